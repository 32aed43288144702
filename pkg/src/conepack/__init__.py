"""Approximate packing over cones given by optimization or separation oracles."""
from .errors import *  # noqa: F401,F403
from .instance import (
    ApproxParams,
    Generator,
    PackingInstance,
    Solution,
    SolveLog,
    new_instance,
    to_fraction,
)
from .oracles import (
    ALL_NON_NEGATIVE,
    AllNonNegative,
    Certificate,
    ExplicitSet,
    FunctionOracle,
    Level,
    Oracle,
    as_separation,
    minimizing_as_sign,
    normalize_certificate,
    sign_as_separation,
)
from .engine import run_general, run_uniform
from .bounds import compute_M, find_initial_bound, parametric_initial_bound
from .parametric import AffineValue, most_violated, separation_as_sign, sign_decision
from .solve import SolveResult, solve

__version__ = "0.1.0"
