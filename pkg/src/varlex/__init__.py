"""varlex: variable-exponent Lebesgue norms, Stepanov window-norm tests for
almost periodicity/automorphy, and convolution solvers for fractional
relaxation equations with Mittag-Leffler resolvent kernels."""

from .errors import ConfigError, ContractError, DivergenceError, DomainError
from .exponents import (ExponentFunction, composition_exponent, conjugate,
                        combine_harmonic)
from .functions import VectorFunction, average_of_translates, lincomb, product, sign_of
# the bare function `modular` stays in its submodule (re-exporting it would
# shadow `varlex.modular` itself)
from .modular import (InequalityReport, ModularPlan, ModularResult, NormResult,
                      embedding_check, holder_check, luxemburg_norm, phi)
from .stepanov import (WindowNormSeries, c0_decay_test, ergodic_mean_test,
                       stepanov_norm, window_norm)
from .almost_automorphy import (ShiftTestReport, asymptotic_decompose,
                                bochner_shift_test, counterexample_divergence,
                                epsilon_period_scan, exponent_sweep_experiment)
from .fractional import (DecayModel, ResolventFamily, caputo_derivative,
                         decay_check, exponential_kernel, g_kernel,
                         mittag_leffler, mittag_leffler_detailed, ml_values,
                         resolvent_eval, weyl_derivative)
from .convolution import (ConvolutionResult, ergodic_component_classify,
                          finite_convolution, line_convolution, m_t_series,
                          solve_dfp, tail_constant_M)
from .composition import (CompositionReport, TwoParameterFunction,
                          asymptotic_composition_test, compose,
                          composition_membership_test, lipschitz_window_check)
from .reports import TestReport

__version__ = "0.1.0"
