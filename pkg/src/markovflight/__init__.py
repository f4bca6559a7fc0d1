"""Series representations, Monte Carlo checks and mixed moments for the
isotropic Markov random flight in R^m."""

__version__ = "0.1.0"

from .charfn import (
    CfEvaluation,
    EvalPoint,
    bessel_series_terms,
    cf_bessel_partial_5,
    cf_bessel_series,
    cf_time_partial_5,
    cf_time_series,
    laplace_cf_closed,
    laplace_numeric_roundtrip,
    laplace_series_A,
    time_series_terms,
)
from .coeffs import (
    CoefficientTable,
    FlightParams,
    Kind,
    derived_by_determinant,
    derived_by_recurrence,
    gamma_even_odd_split,
)
from .exactpoly import BivariatePoly
from .moments import (
    MomentSeries,
    d_operator_monomial,
    eval_moment_series,
    mixed_moment_all_ones,
    mixed_moment_all_twos_series,
)
from .simulate import McConfig, McEstimate, estimate_cf, estimate_mixed_moment
from .specfun import ConvergenceError
