"""Synthetic federation construction: skew, balance, determinism."""

import numpy as np
import pytest

from fl_replay import (DOMINANT_MASS, SyntheticFederation, dominant_classes,
                       make_federation)


def test_shapes_and_equal_sizes():
    fed = make_federation(4, seed=0, num_classes=6, dim=12,
                          samples_per_client=50, test_samples=120)
    assert fed.num_clients == 4
    assert fed.dim == 12
    assert fed.samples_per_client == 50
    for x, y in zip(fed.client_features, fed.client_labels):
        assert x.shape == (50, 12)
        assert y.shape == (50,)
    assert fed.test_features.shape == (120, 12)
    assert fed.test_labels.shape == (120,)


def test_determinism_and_seed_sensitivity():
    a = make_federation(3, seed=11)
    b = make_federation(3, seed=11)
    c = make_federation(3, seed=12)
    assert all(np.array_equal(x, y)
               for x, y in zip(a.client_features, b.client_features))
    assert np.array_equal(a.test_features, b.test_features)
    assert not np.array_equal(a.test_features, c.test_features)


def test_dominant_pair_carries_most_label_mass():
    fed = make_federation(10, seed=2)
    n = fed.samples_per_client
    for k in range(10):
        pair = dominant_classes(k, fed.num_classes)
        share = np.isin(fed.client_labels[k], pair).mean()
        # binomial(200, 0.8) stays within 0.12 of its mean with huge margin
        assert abs(share - DOMINANT_MASS) < 0.12
        top2 = np.argsort(np.bincount(fed.client_labels[k],
                                      minlength=fed.num_classes))[-2:]
        assert set(top2) == set(pair)


def test_clients_have_distinct_dominant_pairs():
    pairs = {dominant_classes(k, 10) for k in range(10)}
    assert len(pairs) == 10


def test_test_split_is_class_balanced():
    fed = make_federation(2, seed=5, test_samples=2000)
    counts = np.bincount(fed.test_labels, minlength=fed.num_classes)
    assert np.all(counts == 200)


def test_make_federation_rejects_bad_arguments():
    with pytest.raises(ValueError):
        make_federation(0, seed=0)
    with pytest.raises(ValueError):
        make_federation(2, seed=0, num_classes=2)  # nothing beyond the pair
    with pytest.raises(ValueError):
        make_federation(2, seed=0, dim=0)
    with pytest.raises(ValueError):
        make_federation(2, seed=0, samples_per_client=0)
    with pytest.raises(ValueError):
        make_federation(2, seed=0, test_samples=0)


def test_federation_invariants_are_enforced():
    fed = make_federation(2, seed=0, samples_per_client=10, test_samples=20)
    short = fed.client_features[1][:5]
    with pytest.raises(ValueError, match="sizes"):
        SyntheticFederation((fed.client_features[0], short),
                            (fed.client_labels[0], fed.client_labels[1][:5]),
                            fed.test_features, fed.test_labels, fed.num_classes)
    with pytest.raises(ValueError, match="dimensions"):
        SyntheticFederation(fed.client_features, fed.client_labels,
                            fed.test_features[:, :3], fed.test_labels,
                            fed.num_classes)
    with pytest.raises(ValueError, match="counts differ"):
        SyntheticFederation(fed.client_features, fed.client_labels[:1],
                            fed.test_features, fed.test_labels, fed.num_classes)
    with pytest.raises(ValueError, match="at least one"):
        SyntheticFederation((), (), fed.test_features, fed.test_labels,
                            fed.num_classes)
    bad = fed.client_labels[0].copy()
    bad[0] = fed.num_classes
    with pytest.raises(ValueError, match="out of range"):
        SyntheticFederation(fed.client_features, (bad, fed.client_labels[1]),
                            fed.test_features, fed.test_labels, fed.num_classes)
