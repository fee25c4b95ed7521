"""Default tolerances, scalable through the DJCG_TOL environment variable.

DJCG_TOL multiplies every validation tolerance in the library (it does not
touch integrator tolerances, which are explicit in IntegratorConfig).
"""

import os


def factor():
    v = os.environ.get("DJCG_TOL")
    return float(v) if v else 1.0


def tol(base):
    """A validation tolerance, scaled by DJCG_TOL if set."""
    return base * factor()


# conditioning threshold above which divisor linear systems are declared
# singular (trajectory samplers skip such instants and record a gap)
COND_MAX = 1e12
