"""Synthetic non-i.i.d. federation for schedule replay.

Ten-class logistic regression on Gaussian features: each class gets its own
mean vector, and each client holds two dominant classes carrying 80% of its
label mass, so client gradients pull the shared model in visibly different
directions while the pooled task stays nearly linearly separable.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_NUM_CLASSES = 10
DEFAULT_DIM = 32
DEFAULT_SAMPLES_PER_CLIENT = 200
DEFAULT_TEST_SAMPLES = 2000
DOMINANT_MASS = 0.8
NUM_DOMINANT = 2
# class-mean spread relative to unit feature noise; keeps the task hard
# enough that late-round participation breadth still moves held-out loss
MEAN_SCALE = 0.6


@dataclass
class SyntheticFederation:
    """Equal-size client datasets plus a held-out, class-balanced test split.

    client_features[k] is (n, d), client_labels[k] is (n,) ints in
    [0, num_classes); all clients share the same n and d.
    """

    client_features: tuple
    client_labels: tuple
    test_features: np.ndarray
    test_labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        if len(self.client_features) != len(self.client_labels):
            raise ValueError("feature/label client counts differ")
        if not self.client_features:
            raise ValueError("federation needs at least one client")
        sizes = {x.shape[0] for x in self.client_features}
        if len(sizes) != 1:
            raise ValueError(f"client dataset sizes must be equal, got {sorted(sizes)}")
        dims = {x.shape[1] for x in self.client_features}
        dims.add(self.test_features.shape[1])
        if len(dims) != 1:
            raise ValueError(f"feature dimensions must agree, got {sorted(dims)}")
        for y in (*self.client_labels, self.test_labels):
            if y.size and (y.min() < 0 or y.max() >= self.num_classes):
                raise ValueError("labels out of range")

    @property
    def num_clients(self) -> int:
        return len(self.client_features)

    @property
    def dim(self) -> int:
        return self.test_features.shape[1]

    @property
    def samples_per_client(self) -> int:
        return self.client_features[0].shape[0]


def dominant_classes(client: int, num_classes: int) -> tuple:
    """The two label classes a client leans on (adjacent pair, wrapping)."""
    return (client % num_classes, (client + 1) % num_classes)


def make_federation(num_clients: int, seed: int,
                    num_classes: int = DEFAULT_NUM_CLASSES,
                    dim: int = DEFAULT_DIM,
                    samples_per_client: int = DEFAULT_SAMPLES_PER_CLIENT,
                    test_samples: int = DEFAULT_TEST_SAMPLES) -> SyntheticFederation:
    """Draw a reproducible skewed federation.

    Class means are MEAN_SCALE times standard normal in R^dim; features are
    unit-variance Gaussians around their class mean. Client k draws DOMINANT_MASS of its
    labels uniformly from its two dominant classes and the rest uniformly
    from the others; the test split cycles through all classes evenly.
    """
    if num_clients < 1:
        raise ValueError("num_clients must be at least 1")
    if num_classes < 2 or num_classes <= NUM_DOMINANT:
        raise ValueError("num_classes must exceed the dominant pair")
    if dim < 1 or samples_per_client < 1 or test_samples < 1:
        raise ValueError("dim, samples_per_client and test_samples must be positive")
    rng = np.random.default_rng(seed)
    means = MEAN_SCALE * rng.standard_normal((num_classes, dim))
    probs = np.full(num_classes, (1.0 - DOMINANT_MASS) / (num_classes - NUM_DOMINANT))
    feats, labels = [], []
    for k in range(num_clients):
        p = probs.copy()
        p[list(dominant_classes(k, num_classes))] = DOMINANT_MASS / NUM_DOMINANT
        y = rng.choice(num_classes, size=samples_per_client, p=p)
        x = means[y] + rng.standard_normal((samples_per_client, dim))
        feats.append(x)
        labels.append(y)
    test_y = np.arange(test_samples) % num_classes
    test_x = means[test_y] + rng.standard_normal((test_samples, dim))
    return SyntheticFederation(tuple(feats), tuple(labels), test_x, test_y,
                               num_classes)
