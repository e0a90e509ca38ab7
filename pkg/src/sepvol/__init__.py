"""Hilbert-Schmidt separable volumes of two-qubit states.

Quasi-Monte Carlo sampling of the Bloore off-diagonal coordinates gives the
separable fraction f(mu) on a grid of diagonal ratios. Integrating f against
an exactly evaluated jacobian yields the separable volume and probability.
"""

from .config import GOLDEN, RunConfig
from .estimator import FTable, VolumeReport, estimate, integrate_volume
from .jacobian import JacobianEvaluator

__all__ = ["GOLDEN", "RunConfig", "FTable", "VolumeReport", "estimate", "integrate_volume", "JacobianEvaluator"]
__version__ = "0.1.0"
