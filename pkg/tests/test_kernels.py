"""The compiled and pure-Python kernels must agree bit-for-bit."""

import random

import pytest

from geostream import _pykernels

cy = pytest.importorskip("geostream._ckernels")

rng = random.Random(42)


@pytest.mark.parametrize("trial", range(50))
def test_scalar_kernels_agree(trial):
    q_lat, q_lon = rng.uniform(0, 100), rng.uniform(0, 100)
    lat, lon = rng.uniform(0, 100), rng.uniform(0, 100)
    dmax = rng.uniform(10, 200)
    assert cy.spatial_cost(q_lat, q_lon, lat, lon, dmax) == \
        _pykernels.spatial_cost(q_lat, q_lon, lat, lon, dmax)

    lo_lat, hi_lat = sorted((rng.uniform(0, 100), rng.uniform(0, 100)))
    lo_lon, hi_lon = sorted((rng.uniform(0, 100), rng.uniform(0, 100)))
    assert cy.rect_min_cost(q_lat, q_lon, lo_lat, lo_lon, hi_lat, hi_lon, dmax) == \
        _pykernels.rect_min_cost(q_lat, q_lon, lo_lat, lo_lon, hi_lat, hi_lon, dmax)

    age = rng.uniform(-100, 1e6)
    base = rng.uniform(1.1, 10)
    unit = rng.uniform(1, 7200)
    assert cy.recency_cost(age, base, unit) == _pykernels.recency_cost(age, base, unit)

    tf, n = rng.randint(0, 9), rng.randint(10, 50)
    ctf, total = rng.randint(0, 100), rng.randint(100, 1000)
    xi = rng.uniform(0, 0.99)
    assert cy.visual_weight(tf, n, ctf, total, xi) == \
        _pykernels.visual_weight(tf, n, ctf, total, xi)

    f = [rng.random() for _ in range(3)]
    w = [rng.random() for _ in range(3)]
    assert cy.combine(*w, *f) == _pykernels.combine(*w, *f)


@pytest.mark.parametrize("trial", range(50))
def test_relevance_kernel_agrees(trial):
    n = rng.randint(1, 200)
    maxima = [rng.uniform(0.0, 1.0) for _ in range(n)]
    weights = [m * rng.random() for m in maxima]
    if rng.random() < 0.3:
        maxima[rng.randrange(n)] = 0.0
    if rng.random() < 0.3:
        weights[rng.randrange(n)] = 0.0
    assert cy.relevance_cost(weights, maxima) == _pykernels.relevance_cost(weights, maxima)


def test_long_query_does_not_underflow():
    weights = [1e-6] * 200
    maxima = [2e-6] * 200
    got = cy.relevance_cost(weights, maxima)
    assert 0.0 <= got <= 1.0
    # ratio (1/2)^200 is tiny but nonzero in log space
    assert got == pytest.approx(1.0, abs=1e-12)
    assert got == _pykernels.relevance_cost(weights, maxima)
