"""Dyadic uncertainty constants of functions on the Cantor dyadic group."""

__version__ = "0.1.0"

from .bounds import UC_LOWER_BOUND, ThetaBound, c_theta, k1_theta, optimize_theta, theta_bound
from .dyadic import (
    DyadicInterval,
    DyadicRational,
    WalshPolynomial,
    character,
    coarsen_cells,
    dyadic_add,
    dyadic_derivative,
    walsh,
)
from .localization import (
    LocalizationReport,
    cell_weights,
    shifted_second_moment,
    uc_series,
    uc_step,
    uc_walsh_poly,
    v_functional,
)
from .optimize import OptimizationResult, minimize_uc, objective, objective_gradient
from .transform import (
    StepFunction,
    fwft,
    step_spectrum,
    step_to_walsh,
    walsh_matrix,
    walsh_to_step,
    wft_walsh_poly,
)
from .wavelets import (
    FrameGeneratorSpec,
    LangParams,
    A_kernel,
    frame_generator,
    frame_uc,
    lang_freq_moment_scaling,
    lang_freq_moment_wavelet,
    lang_scaling_coeffs,
    lang_uc,
    lang_wavelet_step,
)
