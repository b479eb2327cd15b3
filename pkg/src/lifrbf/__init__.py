"""
Equality-constrained RBF regression with locally imposing functions.

Submodules
----------
numerics     pseudo-inverse, weighted least squares, KKT solves
rbf          Gaussian RBF networks and the unconstrained fit
constraints  constraint sets, targets and specs
lif          the normalized Cauchy weight psi
gcnn         constrained fitters and the blended predictor
analysis     coupling-form and weight-change diagnostics
bench        experiment harness (Sinc and PDE benchmarks)
cli          command-line entry point
"""
from .constraints import (
    AxisPlane,
    ConstraintSpec,
    DerivativeTarget,
    IntegratedTarget,
    PointList,
    PredicateRegion,
    ValueTarget,
    builtin_target,
)
from .errors import (
    ConfigError,
    InfeasibleError,
    InvalidInputError,
    LifRbfError,
    NotFittedError,
    UnsupportedOperationError,
)
from .gcnn import (
    GcnnModel,
    fit_gis_lagrange,
    fit_lis_derivative,
    fit_lis_integrated,
    fit_lis_value,
    predict_constrained,
    predict_constrained_derivative,
)
from .lif import aggregate_psi, psi
from .rbf import CenterPolicy, Dataset, RbfModel, feature_map, feature_map_derivative, fit_unconstrained, init_centers, predict

__version__ = "0.1.0"
