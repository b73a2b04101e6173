import numpy as np
import pytest

from liecurv import (
    DegeneratePlane,
    LeftInvariantMetric,
    NotPositiveDefinite,
    b_term,
    koszul_oracle,
    normalized_curvature,
    puttmann_curvature,
)
from liecurv.metric import normalized_curvature_many

from conftest import random_spd


def test_identity_metric_b_term_vanishes(g4):
    m = LeftInvariantMetric(g4, np.eye(6))
    rng = np.random.default_rng(0)
    for _ in range(20):
        z1, z2 = rng.standard_normal((2, 6))
        assert np.linalg.norm(b_term(m, z1, z2)) == 0.0


def test_b_term_symmetric_and_diagonal(g4):
    rng = np.random.default_rng(1)
    m = LeftInvariantMetric(g4, random_spd(rng, 6))
    for _ in range(20):
        z1, z2 = rng.standard_normal((2, 6))
        assert np.linalg.norm(b_term(m, z1, z2) - b_term(m, z2, z1)) < 1e-14
        diag = b_term(m, z1, z1)
        assert np.allclose(diag, g4.bracket(z1, m.phi @ z1), atol=1e-14)


def test_bi_invariant_curvature_law(g4, g3):
    rng = np.random.default_rng(2)
    for g in (g3, g4):
        m = LeftInvariantMetric(g, np.eye(g.dim))
        for _ in range(50):
            z1, z2 = rng.standard_normal((2, g.dim))
            lie = g.bracket(z1, z2)
            assert abs(puttmann_curvature(m, z1, z2) - 0.25 * lie @ lie) < 1e-12


def test_puttmann_symmetry_and_homogeneity(g4):
    rng = np.random.default_rng(3)
    m = LeftInvariantMetric(g4, random_spd(rng, 6))
    for _ in range(20):
        z1, z2 = rng.standard_normal((2, 6))
        k12 = puttmann_curvature(m, z1, z2)
        k21 = puttmann_curvature(m, z2, z1)
        assert abs(k12 - k21) < 1e-12 * (1.0 + abs(k12))
        a = rng.uniform(0.5, 2.0)
        ka = puttmann_curvature(m, a * z1, z2)
        assert abs(ka - a * a * k12) < 1e-10 * (1.0 + abs(ka))


def test_oracle_agreement_spot(g3, g4):
    rng = np.random.default_rng(4)
    for g in (g3, g4):
        for _ in range(50):
            m = LeftInvariantMetric(g, random_spd(rng, g.dim))
            z1, z2 = rng.standard_normal((2, g.dim))
            a = puttmann_curvature(m, z1, z2)
            b = koszul_oracle(m, z1, z2)
            assert abs(a - b) / (1.0 + abs(b)) < 1e-8


def test_oracle_bi_invariant_value(g3):
    m = LeftInvariantMetric(g3, np.eye(3))
    assert abs(koszul_oracle(m, np.eye(3)[0], np.eye(3)[1]) - 0.25) < 1e-14


def test_berger_boundary_metric_nonnegative_on_samples(g3):
    m = LeftInvariantMetric(g3, np.diag([4.0 / 3.0, 1.0, 1.0]))
    rng = np.random.default_rng(5)
    frames = np.linalg.qr(rng.standard_normal((2000, 3, 2)))[0]
    vals = normalized_curvature_many(m, frames[:, :, 0], frames[:, :, 1])
    assert vals.min() >= -1e-9


def test_normalized_curvature_plane_invariance(g4):
    rng = np.random.default_rng(6)
    m = LeftInvariantMetric(g4, random_spd(rng, 6))
    for _ in range(20):
        z1, z2 = rng.standard_normal((2, 6))
        v1 = normalized_curvature(m, z1, z2)
        v2 = normalized_curvature(m, 2.0 * z1, z1 + z2)
        assert abs(v1 - v2) < 1e-10 * (1.0 + abs(v1))


def test_normalized_curvature_identity_orthonormal(g4):
    m = LeftInvariantMetric(g4, np.eye(6))
    rng = np.random.default_rng(7)
    for _ in range(20):
        q, _ = np.linalg.qr(rng.standard_normal((6, 2)))
        lie = g4.bracket(q[:, 0], q[:, 1])
        got = normalized_curvature(m, q[:, 0], q[:, 1])
        assert abs(got - 0.25 * lie @ lie) < 1e-12


def test_degenerate_plane_rejected(g4):
    m = LeftInvariantMetric(g4, np.eye(6))
    z = np.arange(6.0)
    with pytest.raises(DegeneratePlane):
        normalized_curvature(m, z, z)


def test_non_positive_definite_rejected(g4):
    with pytest.raises(NotPositiveDefinite):
        LeftInvariantMetric(g4, np.diag([1.0, 1, 1, 1, 1, 0.0]))
    with pytest.raises(NotPositiveDefinite):
        LeftInvariantMetric(g4, np.diag([1.0, 1, 1, 1, 1, -0.5]))


def test_asymmetric_phi_rejected(g4):
    phi = np.eye(6)
    phi[0, 1] = 1e-6
    with pytest.raises(ValueError):
        LeftInvariantMetric(g4, phi)
