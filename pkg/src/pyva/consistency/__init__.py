from .datacheck import CheckPolicy, data_check
from .hierarchy import SymptomHierarchy
from .impossible import ImpossibleCauses, remove_impossible_causes

__all__ = [
    "CheckPolicy",
    "ImpossibleCauses",
    "SymptomHierarchy",
    "data_check",
    "remove_impossible_causes",
]
