"""Certified robustness radii for randomized smoothing via divergence lower bounds."""

from .divergences import (
    BHATTACHARYYA,
    CHI2,
    HELLINGER2,
    KL,
    TV,
    Divergence,
    TopTwoProbs,
    brute_force_lower_bound,
    divergence,
    lower_bound,
    minimizing_distribution,
    renyi,
)
from .errors import (
    BracketError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    SizeError,
    SmoothCertError,
    TrainingError,
)
from .l2 import certify_l2, hierarchy_report, radius_closed, radius_cohen, radius_generic, renyi_sup
from .lp import radius_equal_eps, radius_lp_naive, tradeoff_frontier
from .numerics import clopper_pearson_lower
from .pipeline import Certificate, SmoothingConfig, certified_accuracy_curve, certify, certify_dataset
from .smoothing import GenGaussian, gn_kl_closed, gn_kl_numeric, gn_sample, kl_coefficient
from .toy import Dataset, ToyModel, eot_pgd_l2, make_blobs, train_noise_augmented

__version__ = "0.1.0"
