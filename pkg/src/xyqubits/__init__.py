"""Two XY-coupled qubits in a common vacuum reservoir: rates, master equations, spectra."""

__version__ = "0.1.0"

from .errors import SimError  # noqa: E402
from .model import SystemParams, derive  # noqa: E402
from .reservoir import composite_rates  # noqa: E402

__all__ = ["SimError", "SystemParams", "__version__", "composite_rates", "derive"]
