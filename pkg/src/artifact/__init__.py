"""Local computations around ordinary toric periods for GL2 over Q_p.

Submodules: local_fields, characters_gamma, weil_deligne, gl2_principal_series,
alg_reps, toric_period, hida_ordinary, pfaffian_reg and the ``verify`` CLI in cli.
"""

__version__ = "0.1.0"
