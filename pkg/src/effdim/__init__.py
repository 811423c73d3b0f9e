"""effdim: Bayesian effective dimension and mutual-information functionals.

Closed-form mutual information for linear Gaussian experiments, the
effective-dimension normalization 2*I/log(n) and its spectral relatives
(ridge degrees of freedom, information effective rank, sandwich bounds),
prior-to-posterior KL audits for approximate Gaussian posteriors, and
global-local shrinkage functionals, each closed form paired with an
independent, seeded Monte Carlo oracle.
"""

from .approx import (
    ApproxAuditReport,
    GaussianDistribution,
    audit_approximation,
    conjugate_regression_info,
    dominating_diagonal,
    gaussian_kl,
    loewner_dominates,
)
from .channel import (
    ChannelSpectrum,
    GaussianChannel,
    coarsen,
    mutual_information,
    reparameterize,
    whitened_spectrum,
)
from .dimension import (
    InfoReport,
    LocationModel,
    RidgeModel,
    SpectrumSequence,
    deff,
    deff_rank_bound,
    design_spectrum,
    info_effective_rank,
    location_mi,
    mi_df_sandwich,
    regression_channel,
    regression_mi,
    ridge_df,
    ridge_report,
    smoothing_matrix,
    spectrum_sequence_mi,
)
from .oracle import (
    McEstimate,
    estimate_channel_mi,
    estimate_gaussian_kl,
    estimate_mixture_marginal_mi,
)
from .priors import (
    FixedScale,
    GlobalLocalRegression,
    HalfCauchy,
    InverseGammaMixture,
    ScalarShrinkageModel,
    ShrinkagePrior,
    TabulatedPrior,
    TailCertificate,
)
from .shrinkage import (
    ChainDecomposition,
    DeffDistributionSummary,
    chain_decomposition,
    conditional_mi,
    expected_conditional_mi,
    heavy_tail_bound,
    jensen_bound,
    random_deff,
    random_deff_distribution,
    regression_conditional_mi,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxAuditReport",
    "ChainDecomposition",
    "ChannelSpectrum",
    "DeffDistributionSummary",
    "FixedScale",
    "GaussianChannel",
    "GaussianDistribution",
    "GlobalLocalRegression",
    "HalfCauchy",
    "InfoReport",
    "InverseGammaMixture",
    "LocationModel",
    "McEstimate",
    "RidgeModel",
    "ScalarShrinkageModel",
    "ShrinkagePrior",
    "SpectrumSequence",
    "TabulatedPrior",
    "TailCertificate",
    "audit_approximation",
    "chain_decomposition",
    "coarsen",
    "conditional_mi",
    "conjugate_regression_info",
    "deff",
    "deff_rank_bound",
    "design_spectrum",
    "dominating_diagonal",
    "estimate_channel_mi",
    "estimate_gaussian_kl",
    "estimate_mixture_marginal_mi",
    "expected_conditional_mi",
    "gaussian_kl",
    "heavy_tail_bound",
    "info_effective_rank",
    "jensen_bound",
    "location_mi",
    "loewner_dominates",
    "mi_df_sandwich",
    "mutual_information",
    "random_deff",
    "random_deff_distribution",
    "regression_channel",
    "regression_conditional_mi",
    "regression_mi",
    "reparameterize",
    "ridge_df",
    "ridge_report",
    "smoothing_matrix",
    "spectrum_sequence_mi",
    "whitened_spectrum",
]
