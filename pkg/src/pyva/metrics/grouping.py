"""
Aggregation of causes into broader groups.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import ConfigurationError, FormatError
from ..model.io import read_table
from ..model.types import CSMFEstimate, UNDETERMINED


@dataclass(frozen=True)
class CauseGrouping:
    mapping: Dict[str, str]
    order: Tuple[str, ...]

    def __post_init__(self):
        order = tuple(dict.fromkeys(self.order))
        missing = sorted(set(self.mapping.values()) - set(order))
        if missing:
            raise FormatError(f"Groups missing from the order: {', '.join(missing)}")
        object.__setattr__(self, "order", order)

    @classmethod
    def from_pairs(cls, pairs):
        mapping = {}
        for cause, group in pairs:
            if cause in mapping and mapping[cause] != group:
                raise FormatError(f"Cause {cause!r} is mapped to two groups")
            mapping[cause] = group
        return cls(mapping, tuple(dict.fromkeys(mapping.values())))

    @classmethod
    def read(cls, path) -> "CauseGrouping":
        """Read a two-column CSV: cause, then group (headers are free)."""
        frame = read_table(path)
        if frame.shape[1] < 2:
            raise FormatError(f"{path}: a grouping needs a cause and a group column")
        return cls.from_pairs(zip(frame.iloc[:, 0].str.strip(), frame.iloc[:, 1].str.strip()))

    @classmethod
    def identity(cls, causes):
        return cls({c: c for c in causes}, tuple(causes))

    def with_undetermined(self, label: str = UNDETERMINED) -> "CauseGrouping":
        if label in self.mapping:
            return self
        return CauseGrouping({**self.mapping, label: label}, self.order + (label,))

    def ordered(self, order_group: Optional[Sequence[str]] = None) -> Tuple[str, ...]:
        if not order_group:
            return self.order
        unknown = [g for g in order_group if g not in self.order]
        if unknown:
            raise ConfigurationError(
                f"Unknown group(s) in the order: {', '.join(unknown)}; valid: {', '.join(self.order)}"
            )
        return tuple(order_group) + tuple(g for g in self.order if g not in order_group)


def aggregate_csmf(
    csmf: CSMFEstimate, grouping: CauseGrouping, order_group: Optional[Sequence[str]] = None
) -> CSMFEstimate:
    """Sum the mass of each group's causes; every cause must be covered."""
    uncovered = [c for c in csmf.causes if c not in grouping.mapping]
    if uncovered:
        raise ConfigurationError(f"Cause(s) not covered by the grouping: {', '.join(uncovered)}")
    groups = grouping.ordered(order_group)
    weights = np.zeros((len(csmf.causes), len(groups)))
    position = {g: j for j, g in enumerate(groups)}
    for i, cause in enumerate(csmf.causes):
        weights[i, position[grouping.mapping[cause]]] = 1.0
    return CSMFEstimate(groups, {g: v @ weights for g, v in csmf.fractions.items()})
