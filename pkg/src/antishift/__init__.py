"""Anti-causal prediction under distribution shift: generative models,
closed-form and learned predictors, d-separation and shift audits."""

__version__ = "0.1.0"

from . import dgp, graph, metrics, posterior, shiftcheck  # noqa: E402
from .dgp import CausalDgp, Dataset, Sample, SpuriousDgp  # noqa: E402
from .posterior import ClosedFormPredictor  # noqa: E402

__all__ = [
    "CausalDgp",
    "ClosedFormPredictor",
    "Dataset",
    "Sample",
    "SpuriousDgp",
    "dgp",
    "graph",
    "metrics",
    "posterior",
    "shiftcheck",
]
