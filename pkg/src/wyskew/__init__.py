"""Wigner-Yanase skew information and skew-information sum uncertainty bounds."""

__version__ = "0.1.0"

from .bounds import (
    BOUND_IDS,
    BoundNotApplicable,
    BoundReport,
    ConjugateFamily,
    GramMatrix,
    combined_bound,
    conjugate_product_bounds,
    evaluate_all,
    gram_bound_snsk2,
    n_sqrt_bound_nsk2,
    n_sum_bound_nsk1,
    pair_sqrt_bound,
    pair_sum_bound,
    sum_sqrt_bound,
)
from .skew import skew_information, std_dev, u_quantity
from .states import (
    BlochVector,
    DensityMatrix,
    ObservableSet,
    from_bloch,
    from_pure,
    random_density,
    random_observable,
    validate,
)
