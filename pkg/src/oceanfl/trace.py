"""Round-by-round run records and their aggregate totals."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .solver import RoundDecision


@dataclass
class RoundRecord:
    """Everything observable about one simulated round.

    queue_after holds the virtual deficit queues after this round's update
    (zeros for queue-free baselines). v_in_effect is the utility weight the
    solver used (0 for baselines). utility = eta * number selected.
    """

    round_t: int
    decision: RoundDecision
    per_client_energy: np.ndarray  # (K,) Joules
    queue_after: np.ndarray  # (K,) Joules
    utility: float
    eta: float
    v_in_effect: float


@dataclass
class Trace:
    """Per-round records of one run plus cached aggregates."""

    policy: str
    records: list
    budgets: np.ndarray  # (K,) total energy budgets H_k in Joules
    total_utility: float = field(init=False)
    per_client_energy: np.ndarray = field(init=False)  # (K,) Joules
    violations: np.ndarray = field(init=False)  # (K,) max(total - H, 0)

    def __post_init__(self):
        self.budgets = np.asarray(self.budgets, dtype=float)
        self.total_utility = float(sum(r.utility for r in self.records))
        if self.records:
            self.per_client_energy = np.sum(
                [r.per_client_energy for r in self.records], axis=0
            )
        else:
            self.per_client_energy = np.zeros_like(self.budgets)
        self.violations = np.maximum(self.per_client_energy - self.budgets, 0.0)

    @property
    def num_rounds(self) -> int:
        return len(self.records)

    @property
    def num_clients(self) -> int:
        return len(self.budgets)

    @property
    def mean_selected(self) -> float:
        if not self.records:
            return 0.0
        return float(np.mean([r.decision.num_selected for r in self.records]))

    @property
    def max_violation(self) -> float:
        return float(np.max(self.violations)) if len(self.violations) else 0.0

    def selected_counts(self) -> np.ndarray:
        return np.array([r.decision.num_selected for r in self.records])
