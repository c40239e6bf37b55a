"""Information gain versus disturbance for pure quantum measurements.

Tools for single-outcome contractions: the singular-value trade-off vector
``z_M``, majorization checks, optimal probabilistic reversal, observable
instruments and repeated-measurement cascades.
"""

from .contraction import Contraction
from .ensembles import Ensemble
from .errors import InfodistError
from .measurement import ObservableSpec, PureInstrument

__version__ = "0.1.0"

__all__ = ["Contraction", "Ensemble", "InfodistError", "ObservableSpec", "PureInstrument", "__version__"]
