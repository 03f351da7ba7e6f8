"""Adaptive high-order optimisation: cubic-regularised steps with randomised
third-order escapes from degenerate saddle points."""

from ._kernels import BACKEND
from .baselines import BaselineConfig, arc_run, gd_run, steihaug_cg, tr_run
from .cubic_subsolver import ModelSolution, model_measures, model_value, solve_cubic_model
from .data_ingest import (Dataset, load_libsvm, map_labels, minmax_scale, parse_libsvm,
                          synthetic_dataset, to_libsvm, to_logistic_problem)
from .driver import (AhomConfig, IterationRecord, RunResult, TheoreticalBounds, ahom_run,
                     escape_attempt, escape_trigger, theoretical_bounds)
from .errors import AhomError, DimensionError, NumericError, ParameterError, ParseError
from .problems import (LogisticProblem, ObjectiveOracle, ProblemMeta, finite_difference_oracle,
                       make_coercive, make_logistic, make_monkey, make_quadratic, taylor_gap)
from .sarp import SarpConfig, SarpOutcome, sarp_step
from .tensor3 import (SubspaceBasis, SymTensor3, accumulate_rank_one_cube, contract_once,
                      contract_to_basis, cubic_form, frobenius_norm, rank_one_cube_sum,
                      trailing_norms)
from .third_order import (AtnResult, CompetitiveSubspace, CriticalMeasures, accs, accs_oracle,
                          atn, critical_measures)

__version__ = "0.1.0"
