"""Default numerical tolerances.

One order of magnitude of headroom per numerical layer: exact algebraic
identities, rank decisions from singular values, and verdicts on sampled
norm inequalities.
"""

import os

ALG_TOL = 1e-9
RANK_TOL = 1e-8
VERDICT_TOL = 1e-7

#: Environment variable overriding the CLI default tolerance.
TOL_ENV = "CSF_TOL"


def default_tol():
    """Tolerance used by the CLI when ``--tol`` is not given."""
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return RANK_TOL
    value = float(raw)
    if not value >= 0:
        raise ValueError(f"{TOL_ENV} must be a nonnegative number, got {raw!r}")
    return value
