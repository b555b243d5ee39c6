"""Detection of sparse heterogeneous mixtures with unequal sample sizes.

Modules
-------
expfam      one-parameter exponential families and their rate functions
samplesize  sample-size laws and their rate functions ``J``
pvalues     exact (randomized) p-values for ``k``-fold convolutions
stats       HC, threshold HC, Bonferroni, rank adjustment, chi-squared
phase       detection boundary curves
mc          Monte Carlo calibration and power studies
cli         command-line front end
"""

from .expfam import BERNOULLI_HALF, GAUSSIAN, POISSON, ExpFamilySpec, get_family
from .phase import CurveId, PhasePoint, b_homogeneous, curve, gaussian_rho, grid_oracle
from .pvalues import PValueSet, pvalues_for_dataset, two_sided_pvalue
from .samplesize import SampleSizeSpec, get_samplesize, sample_K
from .stats import StatisticId, bonferroni, chi_squared, compute_all, hc, hc_threshold, rank_adjust

__version__ = "0.1.0"

__all__ = [
    "BERNOULLI_HALF", "GAUSSIAN", "POISSON", "ExpFamilySpec", "get_family",
    "CurveId", "PhasePoint", "b_homogeneous", "curve", "gaussian_rho", "grid_oracle",
    "PValueSet", "pvalues_for_dataset", "two_sided_pvalue",
    "SampleSizeSpec", "get_samplesize", "sample_K",
    "StatisticId", "bonferroni", "chi_squared", "compute_all", "hc", "hc_threshold", "rank_adjust",
]
