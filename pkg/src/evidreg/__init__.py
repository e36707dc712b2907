"""Evidential regression with uncertainty-quantified predictions.

The library has two layers:

* :mod:`evidreg.grfn` -- a closed-form belief calculus on Gaussian random
  fuzzy numbers (combination, belief/plausibility of intervals, CDF
  bounds, expectations, prediction intervals);
* :mod:`evidreg.model` / :mod:`evidreg.train` / :mod:`evidreg.data` -- a
  prototype-based regressor whose output is such a number, so every
  prediction carries a point value, an aleatory variance and an epistemic
  precision.

:mod:`evidreg.cli` exposes the train / predict / eval / cv / simulate /
plotdata commands.
"""

from .data import Dataset, Standardization, load_csv, save_csv, split, standardize, synthetic_gen
from .errors import EvidregError, InputError, NumericFault, UnboundedQuantile
from .grfn import (
    Gfn,
    Grfn,
    RealInterval,
    bel_interval,
    combine,
    contour,
    lower_cdf,
    lower_expectation,
    pl_interval,
    prediction_interval,
    quantile_lower,
    quantile_upper,
    upper_cdf,
    upper_expectation,
)
from .model import Model, Prototype, forward, forward_batch, load_model, save_model
from .train import TrainConfig, TrainTrace, cost, cross_validate_xi, fit, gradient, loss

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Standardization",
    "load_csv",
    "save_csv",
    "split",
    "standardize",
    "synthetic_gen",
    "EvidregError",
    "InputError",
    "NumericFault",
    "UnboundedQuantile",
    "Gfn",
    "Grfn",
    "RealInterval",
    "bel_interval",
    "combine",
    "contour",
    "lower_cdf",
    "lower_expectation",
    "pl_interval",
    "prediction_interval",
    "quantile_lower",
    "quantile_upper",
    "upper_cdf",
    "upper_expectation",
    "Model",
    "Prototype",
    "forward",
    "forward_batch",
    "load_model",
    "save_model",
    "TrainConfig",
    "TrainTrace",
    "cost",
    "cross_validate_xi",
    "fit",
    "gradient",
    "loss",
    "__version__",
]
