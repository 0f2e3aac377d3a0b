import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hints.analysis.scoring import UNLABELED, score
from hints.errors import ValidationError


def test_perfect_match():
    truth = np.array([[0, 1], [2, 2]])
    r = score(truth, truth)
    assert (r.precision == 1).all() and (r.recall == 1).all() and (r.f1 == 1).all()
    assert r.weighted_precision == r.weighted_recall == r.weighted_f1 == 1


def test_single_label_prediction():
    truth = np.array([0, 0, 1, 1])
    r = score(np.zeros(4, dtype=int), truth)
    assert r.precision[0] == 0.5 and r.recall[0] == 1.0
    assert r.f1[0] == pytest.approx(2 / 3)
    assert r.precision[1] == r.recall[1] == r.f1[1] == 0


def test_unlabeled_pixels_hurt_recall_only():
    truth = np.repeat(np.arange(5), 20)
    pred = truth.copy()
    pred[::10] = UNLABELED
    r = score(pred, truth)
    assert r.weighted_recall == pytest.approx(0.9)
    assert r.weighted_precision == 1.0
    assert r.unlabeled_fraction == pytest.approx(0.1)


def test_weighted_f1_is_harmonic_mean():
    rng = np.random.default_rng(0)
    truth = rng.integers(0, 4, 50)
    pred = rng.integers(0, 4, 50)
    r = score(pred, truth)
    wp = sum((truth == l).mean() * r.precision[l] for l in range(4))
    wr = sum((truth == l).mean() * r.recall[l] for l in range(4))
    assert r.weighted_precision == pytest.approx(wp)
    assert r.weighted_recall == pytest.approx(wr)
    assert r.weighted_f1 == pytest.approx(2 * wp * wr / (wp + wr))


def test_errors():
    with pytest.raises(ValidationError):
        score(np.zeros(3, dtype=int), np.zeros(4, dtype=int))
    with pytest.raises(ValidationError):
        score(np.zeros((2, 2), dtype=int), np.zeros(4, dtype=int))
    with pytest.raises(ValidationError):
        score(np.zeros(2, dtype=int), np.array([0, UNLABELED]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_permutation_covariance(k, n, seed):
    rng = np.random.default_rng(seed)
    truth = rng.integers(0, k, n)
    pred = rng.integers(-1, k, n)
    perm = rng.permutation(k)
    a = score(pred, truth, k)
    b = score(np.where(pred >= 0, perm[np.maximum(pred, 0)], UNLABELED), perm[truth], k)
    assert np.allclose(b.precision[perm], a.precision)
    assert np.allclose(b.recall[perm], a.recall)
    assert np.allclose(b.f1[perm], a.f1)
    assert b.weighted_precision == pytest.approx(a.weighted_precision)
    assert b.weighted_recall == pytest.approx(a.weighted_recall)
    assert b.weighted_f1 == pytest.approx(a.weighted_f1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_values_in_unit_interval(k, n, seed):
    rng = np.random.default_rng(seed)
    r = score(rng.integers(-1, k, n), rng.integers(0, k, n), k)
    for v in (r.precision, r.recall, r.f1):
        assert ((0 <= v) & (v <= 1)).all()
    assert 0 <= r.weighted_f1 <= 1
