"""Three-body adiabatic hyperspherical solver for spinor Bose gases."""

from . import spins

__all__ = ["spins"]
__version__ = "0.1.0"
