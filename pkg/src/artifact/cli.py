"""Batch driver: `verify <command> --config in.json --out report.json`.

Every command reads a JSON config of the form

    {"tolerance": 1e-8, "cases": [{"id": "...", ...}, ...], "random": {...}}

expands the optional ``random`` block into extra cases with a seeded RNG, runs
the cases (optionally in a process pool) and writes a report whose rows are
sorted by case id.  Exit codes: 0 when no case fails, 1 when some case fails,
2 for a bad config.
"""

import argparse
import cmath
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

DEFAULT_TOLERANCE = {
    "gamma": 1e-8,
    "toric_verify": 1e-6,
    "alg_verify": 0.0,
    "ord_project": 0.0,
    "pfaffian": 0.0,
    "duality": 0.0,
}


class ConfigError(ValueError):
    pass


def _require(case, key, kind=None):
    if key not in case:
        raise ConfigError(f"case {case.get('id')!r}: missing key {key!r}")
    value = case[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"case {case.get('id')!r}: {key!r} has the wrong type")
    return value


def _complex(z):
    z = complex(z)
    return [z.real, z.imag]


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def _row(case, identity, status, values, rel_error=None):
    out = {"id": case["id"], "identity": identity, "status": status, "values": values}
    if rel_error is not None:
        out["rel_error"] = rel_error
    return out


def _status(ok):
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# gamma

def _expand_gamma(block, rng):
    """All characters of conductor <= max_conductor, with |mu(p)| in {1/p, p^-1/2, 1/4}
    (or the given ``abs_values``) and a random argument for mu(p)."""
    from .characters_gamma import phi
    cases = []
    for p in block.get("primes", [3, 5, 7]):
        sizes = block.get("abs_values", [1 / p, p ** -0.5, 0.25])
        for n in range(block.get("max_conductor", 2) + 1):
            for e in (range(phi(p, n)) if n else [0]):
                for i, size in enumerate(sizes):
                    z = size * cmath.exp(2j * cmath.pi * rng.random())
                    cases.append({"id": f"gamma-p{p}-n{n}-e{e:02d}-s{i}", "p": p,
                                  "character": {"conductor": n, "unit_exponents": [e],
                                                "value_at_p": _complex(z)}})
    return cases


def _check_gamma(case):
    _require(case, "p", int)
    _require(case, "character", dict)


def _run_gamma(case, tol):
    from .characters_gamma import (FCharacter, epsilon_factor, gamma_factor,
                                   gamma_integral_oracle, l_factor, standard_psi)
    p = case["p"]
    mu = FCharacter.from_json(p, case["character"])
    psi = standard_psi(p)
    L = l_factor(mu)
    g = gamma_factor(mu, psi)
    values = {"L": {"value": _complex(L.value), "order": L.order},
              "epsilon": _complex(epsilon_factor(mu, psi)),
              "gamma": {"value": _complex(g.value), "order": g.order}}
    if g.order != 0 or (mu.is_unramified and abs(mu.value_at_p) >= 1):
        # a pole or zero of gamma, or a divergent integral: nothing to compare
        values["pole"] = L.is_pole
        return _row(case, "tate-integral-gamma", "flagged", values)
    integral = gamma_integral_oracle(mu, psi)
    target = mu(-1) / g.value
    err = _rel(integral, target)
    values.update(integral=_complex(integral), expected=_complex(target))
    return _row(case, "tate-integral-gamma", _status(err < tol), values, err)


# ---------------------------------------------------------------------------
# toric_verify

def _check_toric(case):
    _require(case, "datum", dict)
    check = case.get("check", "toric")
    if check not in ("toric", "unramified", "exceptional"):
        raise ConfigError(f"case {case['id']!r}: unknown check {check!r}")


def _run_toric(case, tol):
    from .gl2_principal_series import InducedSpace
    from .toric_period import (q_ratio, ramified_constant, verify_exceptional_vanishing,
                               verify_toric_period, vol_units)
    from .weil_deligne import RefinedLocalDatum
    datum = RefinedLocalDatum.from_json(case["datum"])
    r = case.get("level", 2)
    check = case.get("check", "toric")
    if check == "unramified":
        space = InducedSpace.from_datum(datum, max(r, 1))
        f, fd = space.spherical(), space.dual().spherical()
        q = q_ratio(f, fd, f, fd, datum)
        expected = vol_units(datum.algebra)
        err = _rel(q.finite(), expected) if q.order == 0 else float("inf")
        return _row(case, "unramified-toric-volume", _status(err < tol),
                    {"ratio": _complex(q.value), "order": q.order, "expected": expected}, err)
    if check == "exceptional":
        ok, report = verify_exceptional_vanishing(datum, r, tol)
        return _row(case, "exceptional-vanishing", _status(ok), report.to_json())
    report = verify_toric_period(datum, r)
    # for ramified E the two sides differ by a known constant
    err = _rel(report.lhs, report.rhs * ramified_constant(datum.algebra))
    return _row(case, "toric-period", _status(err < tol), report.to_json(), err)


# ---------------------------------------------------------------------------
# alg_verify

ALG_CHECKS = ("wa_ord", "unitary", "compare_inf", "matrix_identity")


def _field(rec):
    from .alg_reps import CoefficientField
    kind = rec.get("kind", "split")
    if kind == "split":
        return CoefficientField.split()
    if kind == "rational":
        return CoefficientField.rational()
    return CoefficientField.quadratic(rec.get("T", 0), rec.get("N", 2))


def _expand_alg(block, rng):
    from .alg_reps import weight_sweep
    fields = block.get("fields", [{"kind": "split"}, {"kind": "inert", "T": 0, "N": 2}])
    cases = []
    for (w, k, l) in weight_sweep(block.get("k_max", 8)):
        cases.append({"id": f"wa_ord-w{w}-k{k}-l{l}", "check": "wa_ord", "weight": [w, k, l]})
        for i, fld in enumerate(fields):
            for check in ("unitary", "compare_inf"):
                cases.append({"id": f"{check}-E{i}-w{w}-k{k}-l{l}", "check": check,
                              "weight": [w, k, l], "field": fld})
    for spec in block.get("matrix_identity", []):
        p, kind = spec["p"], spec["kind"]
        for r in spec.get("levels", [1, 2]):
            for j in range(p * p):
                cases.append({"id": f"matrix-{kind}-p{p}-r{r}-j{j:03d}", "check": "matrix_identity",
                              "p": p, "kind": kind, "T": spec.get("T", 0), "N": spec.get("N", 0),
                              "level": r, "j": j})
    return cases


def _check_alg(case):
    check = _require(case, "check", str)
    if check not in ALG_CHECKS:
        raise ConfigError(f"case {case['id']!r}: unknown check {check!r}")
    if check == "matrix_identity":
        for key in ("p", "kind", "j"):
            _require(case, key)
    else:
        wt = _require(case, "weight", list)
        if len(wt) != 3:
            raise ConfigError(f"case {case['id']!r}: weight must be [w, k, l]")


def _run_alg(case, tol):
    from .alg_reps import verify_compare_toric_inf, verify_unitarity, verify_wao_alg
    check = case["check"]
    if check == "matrix_identity":
        from .gl2_principal_series import verify_matrix_identity
        from .local_fields import build_quadratic
        alg = build_quadratic(case["p"], case["kind"], case.get("T", 0), case.get("N", 0))
        ok = verify_matrix_identity(alg, case.get("level", 1), case["j"])
        return _row(case, "hecke-matrix-identity", _status(ok), {"exact": ok})
    w, k, l = case["weight"]
    if check == "wa_ord":
        ok = verify_wao_alg(w, k, l)
        return _row(case, "algebraic-anti-ordinary", _status(ok), {"exact": ok})
    fld = _field(case.get("field", {}))
    if check == "unitary":
        ok = verify_unitarity(w, k, l, fld)
        return _row(case, "algebraic-unitarity", _status(ok), {"exact": ok})
    ok = verify_compare_toric_inf(w, k, l, fld)
    return _row(case, "archimedean-toric-comparison", _status(ok), {"exact": ok})


# ---------------------------------------------------------------------------
# ord_project

def _expand_ord(block, rng):
    p, m, d = block.get("p", 5), block.get("m", 20), block.get("dim", 6)
    cases = []
    for i in range(block.get("count", 0)):
        mat = [[rng.randrange(p ** m) for _ in range(d)] for _ in range(d)]
        cases.append({"id": f"ord-{i:04d}", "p": p, "m": m, "matrix": mat})
    return cases


def _check_ord(case):
    for key in ("p", "m"):
        _require(case, key, int)
    mat = _require(case, "matrix", list)
    if not mat or any(len(row) != len(mat) for row in mat):
        raise ConfigError(f"case {case['id']!r}: matrix must be square")


def _run_ord(case, tol):
    from .hida_ordinary import (TruncatedPAdicMatrix, check_ordinary_projector,
                                fitting_projector_mod_p, ordinary_projector,
                                projector_by_group_order)
    U = TruncatedPAdicMatrix(case["matrix"], case["p"], case["m"])
    e, steps = ordinary_projector(U, return_steps=True)
    checks = check_ordinary_projector(U, e)
    if U.dim <= 4:
        checks["fitting_mod_p"] = e.reduce(1) == fitting_projector_mod_p(U)
        checks["group_order_power"] = e == projector_by_group_order(U)
    values = {"checks": checks, "steps": steps, "rank_mod_p": e.rank_mod_p(),
              "projector": [[str(x) for x in row] for row in e.tolist()]}
    return _row(case, "ordinary-projector", _status(all(checks.values())), values)


# ---------------------------------------------------------------------------
# pfaffian

def _random_skew(rng, r, lo=-3, hi=3):
    A = [[0] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            x = rng.randint(lo, hi)
            A[i][j], A[j][i] = x, -x
    return A


def _expand_pf(block, rng):
    cases = []
    ranks = block.get("ranks", [2, 4, 6])
    dims = block.get("dims", [1, 2, 3])
    for i in range(block.get("count", 0)):
        r, d = rng.choice(ranks), rng.choice(dims)
        mats = [_random_skew(rng, r) for _ in range(d)]
        case = {"id": f"pf-{i:04d}"}
        case["gram"] = [[[mats[k][a][b] for k in range(d)] for b in range(r)] for a in range(r)]
        if r % 2:
            S = [[0] * r for _ in range(r)]
            for a in range(r):
                for b in range(a, r):
                    S[a][b] = S[b][a] = rng.randint(-3, 3)
            case["companion"] = S
        cases.append(case)
    return cases


def _check_pf(case):
    gram = _require(case, "gram", list)
    r = len(gram)
    if any(len(row) != r for row in gram):
        raise ConfigError(f"case {case['id']!r}: gram must be r x r x d")


def _run_pf(case, tol):
    from .pfaffian_reg import (SkewPairingData, canonical_poly, pfaffian_minus, pfaffian_plus,
                               verify_rel_reg)
    data = SkewPairingData.from_json(case)
    if data.r % 2 == 0:
        ok = verify_rel_reg(data)
        values = {"pfaffian": [[list(m), str(c)] for m, c in canonical_poly(pfaffian_plus(data))]}
        return _row(case, "pfaffian-square-discriminant", _status(ok), values)
    res = pfaffian_minus(data)
    values = {"vector": [str(v.as_expr()) for v in res.vector], "flags": res.flags}
    if res.flagged:
        return _row(case, "odd-pfaffian-discriminant", "flagged", values)
    ok = verify_rel_reg(data)
    return _row(case, "odd-pfaffian-discriminant", _status(ok), values)


# ---------------------------------------------------------------------------
# duality

def _unimodular(rng, n):
    """A random integer matrix of determinant 1 and its integer inverse."""
    P = [[int(i == j) if j <= i else rng.randint(-2, 2) for j in range(n)] for i in range(n)]
    Pinv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    # back-substitution for the unit upper triangular P
    for col in range(n):
        for i in range(n - 1, -1, -1):
            Pinv[i][col] = int(i == col) - sum(P[i][k] * Pinv[k][col] for k in range(i + 1, n))
    return P, [[int(x) for x in row] for row in Pinv]


def _random_module(rng, max_order=12):
    """Copies of the regular representation of a random abelian T, |T| <= max_order,
    written in a random integral basis."""
    from .hida_ordinary import FiniteAbelianGroup, GroupAlgebraModule
    shapes = [[n] for n in range(2, max_order + 1)]
    shapes += [[a, b] for a in range(2, 7) for b in range(a, 7) if a * b <= max_order]
    G = FiniteAbelianGroup(tuple(rng.choice(shapes)))
    copies = rng.randint(1, 2)
    n = G.order * copies
    P, Pinv = _unimodular(rng, n)
    mats = []
    for g in GroupAlgebraModule.regular(G).gens:
        block = [[0] * n for _ in range(n)]
        for c in range(copies):
            for i in range(G.order):
                for j in range(G.order):
                    block[c * G.order + i][c * G.order + j] = int(g[i][j])
        conj = [[sum(P[i][k] * block[k][l] * Pinv[l][j] for k in range(n) for l in range(n))
                 for j in range(n)] for i in range(n)]
        mats.append(conj)
    return G, mats


def _expand_duality(block, rng):
    cases = []
    for i in range(block.get("count", 0)):
        G, mats = _random_module(rng, block.get("max_order", 12))
        n = len(mats[0]) if mats else 1
        cases.append({"id": f"duality-{i:04d}", "factors": list(G.factors),
                      "matrices": mats,
                      "functional": [rng.randint(-5, 5) for _ in range(n)],
                      "samples": [[rng.randint(-5, 5) for _ in range(n)] for _ in range(2)],
                      "seed": rng.randrange(2 ** 31)})
    return cases


def _check_duality(case):
    _require(case, "factors", list)
    _require(case, "functional", list)


def _case_module(case):
    """The T-module described by a case (trivial action when no matrices are given)."""
    from .hida_ordinary import FiniteAbelianGroup, GroupAlgebraModule
    G = FiniteAbelianGroup(tuple(case["factors"]))
    mats = case.get("matrices")
    if not mats:
        return GroupAlgebraModule.trivial_action(G, len(case["functional"]))
    return GroupAlgebraModule(G, mats)


def _group_average(module, X, transpose=False):
    """sum_t A_t^T X A_t (transpose=True) or sum_t A_t X A_t^-1, exactly."""
    total = np.zeros((module.dim, module.dim), dtype=object)
    for t in module.group.elements:
        A = np.array(module.action(t), dtype=object)
        if transpose:
            total = total + A.T.dot(X).dot(A)
        else:
            Ainv = np.array(module.action(module.group.inv(t)), dtype=object)
            total = total + A.dot(X).dot(Ainv)
    return total


def _run_duality(case, tol):
    from .hida_ordinary import (adjoint_operator, alpha_map, beta_map, is_S_linear,
                                promote_pairing)
    module = _case_module(case)
    G = module.group
    n = module.dim
    lam = [Fraction(x) for x in case["functional"]]
    samples = [[Fraction(x) for x in s] for s in case.get("samples", [])] or [lam]
    alpha, beta = alpha_map(module, lam), beta_map(module, lam)
    trace_ok = all(alpha(m) == beta(m).scale(Fraction(1, G.order)) for m in samples)
    linear_ok = is_S_linear(module, beta, samples)
    rng = random.Random(case.get("seed", 0))
    # a T-invariant perfect pairing: average a positive diagonal form over T
    base = np.diag([Fraction(rng.randint(1, 3)) for _ in range(n)])
    gram = _group_average(module, base, transpose=True).tolist()
    pairing = promote_pairing(module, module, gram, iota=G.inv)
    # a T-linear operator: average a random matrix over T
    R = np.array([[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)], dtype=object)
    A = _group_average(module, R)
    Ai = np.array(adjoint_operator(pairing, A.tolist()), dtype=object)
    x, y = samples[0], samples[-1]
    adjoint_ok = pairing(list(A.dot(x)), y) == pairing(x, list(Ai.dot(y)))
    values = {"trace_duality": trace_ok, "linear": linear_ok, "adjunction": adjoint_ok,
              "beta": [str(c) for c in beta(samples[0]).coeffs]}
    return _row(case, "trace-duality-and-adjunction",
                _status(trace_ok and linear_ok and adjoint_ok), values)


# ---------------------------------------------------------------------------
# driver

COMMANDS = {
    "gamma": (_check_gamma, _expand_gamma, _run_gamma),
    "toric_verify": (_check_toric, None, _run_toric),
    "alg_verify": (_check_alg, _expand_alg, _run_alg),
    "ord_project": (_check_ord, _expand_ord, _run_ord),
    "pfaffian": (_check_pf, _expand_pf, _run_pf),
    "duality": (_check_duality, _expand_duality, _run_duality),
}


def build_cases(command, config, seed):
    """Validate a config and return the full, deterministic list of cases."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    check, expand, _ = COMMANDS[command]
    cases = list(config.get("cases", []))
    if not isinstance(cases, list) or not all(isinstance(c, dict) for c in cases):
        raise ConfigError("'cases' must be a list of objects")
    if "random" in config:
        if expand is None:
            raise ConfigError(f"command {command!r} takes no 'random' block")
        if not isinstance(config["random"], dict):
            raise ConfigError("'random' must be an object")
        cases += expand(config["random"], random.Random(seed))
    seen = set()
    for case in cases:
        cid = case.get("id")
        if not isinstance(cid, str):
            raise ConfigError("every case needs a string 'id'")
        if cid in seen:
            raise ConfigError(f"duplicate case id {cid!r}")
        seen.add(cid)
        check(case)
    return cases


def run_case(command, case, tol, timing=False):
    start = time.perf_counter()
    try:
        row = COMMANDS[command][2](case, tol)
    except Exception as exc:  # a crash is a failed case, not a failed run
        row = _row(case, command, "fail", {"error": f"{type(exc).__name__}: {exc}"})
    if timing:
        row["seconds"] = round(time.perf_counter() - start, 3)
    return row


def _run_case_args(args):
    return run_case(*args)


def run(command, config, tolerance=None, jobs=1, seed=0, timing=False):
    """Run every case of a config and return the report dictionary."""
    cases = build_cases(command, config, seed)
    tol = tolerance if tolerance is not None else config.get("tolerance", DEFAULT_TOLERANCE[command])
    args = [(command, case, tol, timing) for case in cases]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_case_args, args))
    else:
        rows = [run_case(*a) for a in args]
    rows.sort(key=lambda row: row["id"])
    counts = {s: sum(row["status"] == s for row in rows) for s in ("pass", "fail", "flagged")}
    return {"command": command, "seed": seed, "tolerance": tol, "summary": counts, "cases": rows}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="verify", description="Run a verification suite.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", required=True, help="JSON report path ('-' for stdout)")
    parser.add_argument("--tolerance", type=float, default=None)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--timing", action="store_true",
                        help="record per-case seconds (makes reports run-dependent)")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            config = json.load(fh)
        report = run(args.command, config, args.tolerance, max(1, args.jobs), args.seed,
                     args.timing)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    s = report["summary"]
    print(f"{args.command}: {s['pass']} pass, {s['fail']} fail, {s['flagged']} flagged",
          file=sys.stderr)
    return 1 if s["fail"] else 0


if __name__ == "__main__":
    sys.exit(main())
