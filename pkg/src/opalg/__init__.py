"""opalg: a desk-scale numerical workbench for finite-dimensional operator algebras."""

from ._kernel import backend_name
from .config import DEFAULT, ToleranceConfig

__version__ = "0.1.0"

__all__ = ["ToleranceConfig", "DEFAULT", "backend_name", "__version__"]
