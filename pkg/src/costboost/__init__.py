"""Cost-sensitive AdaBoost variants with decision stumps."""

from .boosters import ALGORITHMS, TrainConfig, TrainedModel, bayes_threshold, train, tune_threshold
from .core import CostSpec, Dataset, Ensemble, InputError, Stump, predict
from .datagen import SynthSpec, generate, load_csv, save_csv
from .metrics import cost_error, exp_bound_trace

__all__ = [
    "ALGORITHMS", "TrainConfig", "TrainedModel", "bayes_threshold", "train", "tune_threshold",
    "CostSpec", "Dataset", "Ensemble", "InputError", "Stump", "predict",
    "SynthSpec", "generate", "load_csv", "save_csv", "cost_error", "exp_bound_trace",
]
__version__ = "0.1.0"
