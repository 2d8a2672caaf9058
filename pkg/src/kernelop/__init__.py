"""kernelop: learning convolution kernels in operators from noisy data.

The pipeline is: generate (or load) a dataset of semi-discrete
input/output pairs for one of the three operator families, assemble the
data-adaptive regularization system (or one of the baseline systems), and
solve it with direct Tikhonov or iterative/hybrid bidiagonalization
regularization. See the demos/ directory for narrative walkthroughs and
the `kernelop` command line for the experiment harness.
"""

from .grids import Grids, build_grids
from .operators import (ExampleId, OperatorSpec, eval_g, forward_riemann,
                        g_matrix, operator_spec)
from .data import (Dataset, InputSample, TRUE_KERNELS, eval_input,
                   eval_input_derivative, generate_dataset, load_dataset,
                   make_input, sample_input, save_dataset)
from .adaptive import (AdaptiveSystem, Estimate, SolverReport, assemble,
                       build_exploration_measure, eval_estimate, spectrum_csv)
from .direct import (EigenSystem, eigensystem, minimal_norm_ls,
                     select_lambda_gcv, select_lambda_lcurve, solve_tikhonov,
                     tikhonov)
from .krylov import (DiscrepancyStop, GkbState, LCurveStop, gkb_step,
                     init_gkb, project_f, run_gkb, run_hybrid, run_iterative)
from .baselines import (GaussianSystem, L2RhoSystem, assemble_gaussian,
                        assemble_l2rho, solve_l2rho)
from .metrics import RunSummary, relative_l2_error, summarize, write_runs_csv

__version__ = "0.1.0"

__all__ = [
    "AdaptiveSystem", "Dataset", "DiscrepancyStop", "EigenSystem",
    "Estimate", "ExampleId", "GaussianSystem", "GkbState", "Grids",
    "InputSample", "L2RhoSystem", "LCurveStop", "OperatorSpec",
    "RunSummary", "SolverReport", "TRUE_KERNELS", "assemble",
    "assemble_gaussian", "assemble_l2rho", "build_exploration_measure",
    "build_grids", "eigensystem", "eval_estimate", "eval_g", "eval_input",
    "eval_input_derivative", "forward_riemann", "g_matrix",
    "generate_dataset", "gkb_step", "init_gkb", "load_dataset",
    "make_input", "minimal_norm_ls", "operator_spec", "project_f",
    "relative_l2_error", "run_gkb", "run_hybrid", "run_iterative",
    "sample_input", "save_dataset", "select_lambda_gcv",
    "select_lambda_lcurve", "solve_l2rho", "solve_tikhonov", "spectrum_csv",
    "summarize", "tikhonov", "write_runs_csv",
]
