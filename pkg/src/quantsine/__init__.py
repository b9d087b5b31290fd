"""Exact and simulated statistics of least-squares amplitude estimation for quantized sine waves."""

__version__ = "0.1.0"

from .signal import QuantizerSpec, SineSpec, make_record, quant_error, quantize, sample_sine  # noqa: E402
from .lsfit import FitResult, ThetaEstimate, amp_sq_estimate, fit_theta, general_ls_solve  # noqa: E402
from .special import (  # noqa: E402
    GSum,
    SeriesControl,
    bessel_j,
    g_closed,
    g_derivative,
    g_gray,
    g_min_envelope,
    g_series,
    riemann_zeta_4_3,
)
from .fda import (  # noqa: E402
    BiasReport,
    SieveSolution,
    amp_bias_delta_method,
    asymptotic_second_moment,
    bias_finite_n,
    bound_b1,
    bound_b2,
    diophantine_sieve,
    h_term,
)
from .ada import (  # noqa: E402
    MomentReport,
    PhasePartition,
    PhiInterval,
    ada_moments,
    build_partition,
    exact_moments,
    joint_moment,
    level_phi_set,
)
from .montecarlo import (  # noqa: E402
    McConfig,
    McReport,
    gaussian_reference_variance,
    mc_amp,
    mc_amp_sq,
    simple_model_moments,
)
