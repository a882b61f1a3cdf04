"""Distribution-free goodness-of-fit tests for bivariate tail copulas."""

from .empirical import (DensityMeasure, EmpiricalSignedMeasure, ThetaEstimate, build_eta_measure,
                        empirical_tail_copula, estimate_theta_mom, integrate)
from .families import Rectangle, TailCopulaFamily
from .marginals import MarginalFit, fit_marginal, standardize
from .pipeline import TestReport, run_test
from .stats import BenchmarkTable, p_value, test_statistics, wiener_benchmark
from .transform import (GridSpec, InformationCurve, TransformedField, Transformer, fgh,
                        information_curve, score_vector, transform_field)

__version__ = "0.1.0"
