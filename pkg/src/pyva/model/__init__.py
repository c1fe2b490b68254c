from .dataset import Alignment, ValidationReport, align, ensure_codable, validate_dataset
from .io import read_symptom_csv, write_symptom_csv
from .types import (
    UNDETERMINED,
    CauseList,
    CondProbMatrix,
    CSMFEstimate,
    IndivProbResult,
    PriorCSMF,
    SymptomMatrix,
    SymptomValue,
)

__all__ = [
    "Alignment",
    "CSMFEstimate",
    "CauseList",
    "CondProbMatrix",
    "IndivProbResult",
    "PriorCSMF",
    "SymptomMatrix",
    "SymptomValue",
    "UNDETERMINED",
    "ValidationReport",
    "align",
    "ensure_codable",
    "read_symptom_csv",
    "validate_dataset",
    "write_symptom_csv",
]
