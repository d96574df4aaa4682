"""FedAvg replay of an exported selection schedule.

Consumes the simulator's schedule JSON ({"T", "K", "rounds"}) and replays it
against a synthetic federation: every selected client runs full-batch
gradient descent from the broadcast weights, the server averages the returned
weights (sizes are equal by construction, so the size-weighted mean is the
plain mean), and the model is scored on the held-out split after every round.
"""

import json
from dataclasses import dataclass

import numpy as np

from .data import SyntheticFederation

SCHEDULE_KEYS = {"T", "K", "rounds"}
DEFAULT_LR = 0.1
DEFAULT_LOCAL_EPOCHS = 1
INIT_SCALE = 0.01


@dataclass
class Schedule:
    """Participation plan: which clients upload in each round."""

    horizon: int
    num_clients: int
    rounds: tuple  # horizon tuples of strictly ascending client indices

    def __post_init__(self):
        if self.horizon < 1 or self.num_clients < 1:
            raise ValueError("horizon and num_clients must be positive")
        if len(self.rounds) != self.horizon:
            raise ValueError(
                f"expected {self.horizon} rounds, got {len(self.rounds)}")
        for t, sel in enumerate(self.rounds):
            ids = list(sel)
            if any(i < 0 or i >= self.num_clients for i in ids):
                raise ValueError(f"round {t}: client index out of range")
            if any(a >= b for a, b in zip(ids, ids[1:])):
                raise ValueError(f"round {t}: indices must be strictly ascending")

    @property
    def mean_selected(self) -> float:
        return float(np.mean([len(sel) for sel in self.rounds]))


def _as_index(value) -> int:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"client index must be an integer, got {value!r}")
    return value


def load_schedule(path: str) -> Schedule:
    """Read and validate a schedule JSON file."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict) or set(raw) != SCHEDULE_KEYS:
        raise ValueError(f"schedule must have exactly the keys {sorted(SCHEDULE_KEYS)}")
    horizon, num_clients = _as_index(raw["T"]), _as_index(raw["K"])
    if not isinstance(raw["rounds"], list):
        raise ValueError("rounds must be a list")
    rounds = []
    for sel in raw["rounds"]:
        if not isinstance(sel, list):
            raise ValueError("each round must be a list of client indices")
        rounds.append(tuple(_as_index(i) for i in sel))
    return Schedule(horizon, num_clients, tuple(rounds))


@dataclass
class ReplayResult:
    """Per-round held-out metrics plus the final global weights."""

    losses: np.ndarray      # (horizon,)
    accuracies: np.ndarray  # (horizon,)
    final_weights: np.ndarray  # (dim + 1, num_classes), bias row last


def _augment(features):
    return np.hstack([features, np.ones((features.shape[0], 1))])


def init_weights(dim: int, num_classes: int, rng) -> np.ndarray:
    return INIT_SCALE * rng.standard_normal((dim + 1, num_classes))


def _log_softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def evaluate(weights, features, labels):
    """Mean cross-entropy and accuracy of one weight matrix on one dataset."""
    logp = _log_softmax(_augment(features) @ weights)
    loss = float(-logp[np.arange(labels.size), labels].mean())
    acc = float((logp.argmax(axis=1) == labels).mean())
    return loss, acc


def local_train(weights, features, labels, local_epochs: int, lr: float):
    """Full-batch gradient descent from the broadcast weights."""
    xa = _augment(features)
    onehot = np.eye(weights.shape[1])[labels]
    w = weights
    for _ in range(local_epochs):
        probs = np.exp(_log_softmax(xa @ w))
        w = w - lr * xa.T @ (probs - onehot) / labels.size
    return w


def replay(schedule: Schedule, federation: SyntheticFederation,
           local_epochs: int = DEFAULT_LOCAL_EPOCHS, lr: float = DEFAULT_LR,
           seed: int = 0) -> ReplayResult:
    """Run the schedule through one federated training pass.

    Rounds with no selected clients leave the model untouched (they still get
    a metrics row). Aggregation is the mean over the selected clients'
    locally trained weights, which is permutation-invariant up to float
    summation order.
    """
    if schedule.num_clients != federation.num_clients:
        raise ValueError(
            f"schedule expects {schedule.num_clients} clients, federation has "
            f"{federation.num_clients}")
    if local_epochs < 1:
        raise ValueError("local_epochs must be at least 1")
    if lr <= 0.0:
        raise ValueError("lr must be positive")
    rng = np.random.default_rng(seed)
    w = init_weights(federation.dim, federation.num_classes, rng)
    losses, accs = [], []
    for sel in schedule.rounds:
        if sel:
            locals_ = [local_train(w, federation.client_features[k],
                                   federation.client_labels[k],
                                   local_epochs, lr) for k in sel]
            w = np.mean(locals_, axis=0)
        loss, acc = evaluate(w, federation.test_features, federation.test_labels)
        losses.append(loss)
        accs.append(acc)
    return ReplayResult(np.asarray(losses), np.asarray(accs), w)
