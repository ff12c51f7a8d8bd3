from .settings import settings

from .exceptions import EigenstrataError
from .ensembles import EnsembleKind, EnsembleSpec

from . import specfn, orderstats, exactdensity, phasedecomp, asymptotics
from . import gaussdecomp, tracywidom, montecarlo

# --- Version ---
try:
    from ._version import version as __version__  # type: ignore
except ImportError:
    __version__ = "unknown"
