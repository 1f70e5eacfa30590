from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .seqcore import CodonSeq

DIRECTIONS = ("max", "min")


def direction_sign(direction: str) -> int:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    return 1 if direction == "max" else -1


@dataclass(frozen=True)
class OptimizationResult:
    """A recoded sequence with its CPB and how it was found.

    ``optimal`` is True only when the method proved optimality for the
    problem it solved (unconstrained for ``dp``, fixed distribution for
    ``exact`` and ``bnb``).
    """

    sequence: CodonSeq
    cpb: float
    method: str
    direction: str
    optimal: bool
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def codons(self) -> tuple[str, ...]:
        return self.sequence.codons

    @property
    def total_score(self) -> float:
        return self.cpb * self.sequence.n_pairs
