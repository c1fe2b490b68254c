"""
Cause-of-death coders. Importing this package registers every coder with
:data:`CoderFactory`.
"""

from .base import Coder, CoderFactory, CodingResult
from .insilico import InSilicoCoder
from .interva import InterVACoder
from .nbc import NBCCoder
from .tariff import TariffCoder

__all__ = [
    "Coder",
    "CoderFactory",
    "CodingResult",
    "InSilicoCoder",
    "InterVACoder",
    "NBCCoder",
    "TariffCoder",
]
