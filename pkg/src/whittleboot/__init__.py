"""whittleboot: Whittle estimation with a hybrid frequency-domain bootstrap."""

from .errors import InvalidInputError, NumericError
from .spectral import (
    TimeSeries,
    FourierGrid,
    Periodogram,
    Taper,
    fourier_grid,
    dft,
    periodogram,
    taper_weights,
    tapered_periodogram,
    subsample_periodograms,
    read_series_csv,
)
from .smoothing import (
    SpectralDensityEstimate,
    SubsampleMeanSpectrum,
    bartlett_priestley_weight,
    kernel_spectral_estimate,
    cv_bandwidth,
    subsample_mean_spectrum,
)
from .families import SpectralFamily, WhiteNoiseFamily, ARFamily
from .whittle import (
    ParamEstimate,
    YuleWalkerFit,
    whittle_objective,
    whittle_score,
    whittle_hessian,
    minimize_whittle,
    ar1_closed_form,
    pseudo_true_parameter,
    score_vector,
    fejer_kernel,
    debiased_expected_spectrum,
    debiased_family,
    debiased_objective,
    yule_walker,
    boundary_extension_dft,
    boundary_periodogram,
    select_ar_order_aic,
)
from .oracles import oracle_matrices, oracle_v2_linear
from .linalg import psd_sqrt, psd_inv_sqrt, psd_project
from .bootstrap import (
    BootstrapConfig,
    BootstrapComponents,
    BootstrapDistribution,
    default_block_length,
    mult_pseudo_periodogram,
    v1_star,
    w_star,
    bootstrap_theta_star,
    z_star,
    convolved_m_plus,
    sigma_plus,
    c_plus,
    v2_plus,
    assemble_l_star,
    w_hat_star,
    gaussian_pseudo_series,
    tapered_pseudo_periodogram,
    run_hybrid_bootstrap,
    run_variant_bootstrap,
)
from .simulation import (
    MODELS,
    SimulationModel,
    ExperimentResult,
    laplace_sample,
    generate,
    a0_oracle,
    exact_distribution,
    d1_distance,
    d1_to_normal,
    run_experiment,
)
from .sunspot import SunspotAnalysis, analyze_periodicity, peak_frequency_grid, spectral_peak

__version__ = "0.1.0"
