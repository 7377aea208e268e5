"""Learn quantum-circuit unitaries with Cayley-retraction descent on the unitary group."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
