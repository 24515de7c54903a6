"""Interval and fuzzy physics-informed neural networks.

Solves PDEs with interval/fuzzy parameter fields by training one network for
the min/max solution branches and one for the bounded input-field
realizations that produce them, verified against independent FEM /
finite-difference / grid-search oracles.
"""

__version__ = "0.1.0"

from . import autodiff, fuzzy_driver, neural, oracle, problem, training, uncertainty
from .fuzzy_driver import AlphaSchedule, assemble_membership, run_fpinn
from .problem import ProblemDefinition, get_fuzzy_problem, get_problem
from .training import TrainingConfig, default_config, train
from .uncertainty import FuzzyNumber, Interval, IntervalField, alpha_level_optimize
