"""Language graphs from colexification, phonological, genealogical and geographic distances."""

from .errors import ColexGraphError
from .graph import LanguageGraph, RelatednessLevel, assemble
from .pairtable import PairValueTable

__version__ = "0.1.0"

__all__ = ["ColexGraphError", "LanguageGraph", "PairValueTable", "RelatednessLevel", "assemble"]
