"""Single-species and two-species discrete-time population models with
Allee effects: equilibria, stability, nullclines, basins of attraction and
executable checks of the convergence and basin theorems."""

from importlib import metadata

try:
    __version__ = metadata.version("artifact")
except metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import DomainError, HypothesisError, PreconditionError
from .planar import PlanarMap
from .scalar import ScalarModel

__all__ = ["DomainError", "HypothesisError", "PreconditionError", "PlanarMap", "ScalarModel",
           "__version__"]
