import numpy as np
import pytest

from liecurv import (
    Budget,
    HorizonExceeded,
    LeftInvariantMetric,
    S3ActionParams,
    VERDICT_NEGATIVE,
    VERDICT_NONNEGATIVE,
    eigenstructure,
    infinitesimal_check,
    kappa_third_deriv,
    lemma_k_check,
    min_curvature,
    normalized_curvature,
    path_scan,
    s3_action_phi,
    s3_action_psi,
    sample_commuting_pairs,
    torus_psi,
)
from liecurv.verify import derived_seed

from conftest import random_symmetric

LIGHT = Budget(samples=512, restarts=8, iters=60)


def test_sampling_empty_on_so3(g3):
    assert sample_commuting_pairs(g3, 10, seed=0) == []


def test_sampled_pairs_commute_exactly(g4):
    for pair in sample_commuting_pairs(g4, 50, seed=1):
        assert np.linalg.norm(g4.bracket(pair.x, pair.y)) == 0.0
        gram = np.array([
            [pair.x @ pair.x, pair.x @ pair.y],
            [pair.x @ pair.y, pair.y @ pair.y],
        ])
        assert np.linalg.det(gram) > 1e-4  # independent, not just commuting


def test_sampling_is_seed_deterministic(g4):
    a = sample_commuting_pairs(g4, 20, seed=42)
    b = sample_commuting_pairs(g4, 20, seed=42)
    for pa, pb in zip(a, b):
        assert np.array_equal(pa.x, pb.x) and np.array_equal(pa.y, pb.y)


def test_every_commuting_pair_splits_across_factors(g4):
    """Planes spanned by commuting pairs always contain one vector from each
    factor: checked by solving [x, .] = 0 directly over random x."""
    rng = np.random.default_rng(2)
    n = 10_000
    xs = rng.standard_normal((n, 6))
    ads = np.einsum("ijk,ni->nkj", g4.structure, xs)
    _, svals, vhs = np.linalg.svd(ads)
    assert (svals[:, -2] < 1e-10).all()  # null space is at least 2-dimensional
    for i in range(0, n, 7):
        plane = vhs[i, -2:]  # spans the centralizer of xs[i]
        for part in (plane[:, :3], plane[:, 3:]):
            s = np.linalg.svd(part, compute_uv=False)
            assert s[-1] < 1e-8  # a combination vanishes on this factor


def test_min_curvature_identity_metric(g4):
    m = LeftInvariantMetric(g4, np.eye(6))
    rep = min_curvature(m, LIGHT, seed=3)
    assert rep.verdict == VERDICT_NONNEGATIVE
    assert -1e-12 <= rep.min_value <= 1e-12
    w = np.array(rep.witness)
    assert np.linalg.norm(g4.bracket(w[0], w[1])) < 1e-6  # minimizer is commuting


def test_min_curvature_detects_berger_excess(g4):
    m = LeftInvariantMetric(g4, np.diag([1.4, 1, 1, 1, 1, 1.0]))
    rep = min_curvature(m, LIGHT, seed=4)
    assert rep.verdict == VERDICT_NEGATIVE
    assert rep.min_value < -1e-3


def test_min_curvature_known_family_nonnegative(g4):
    p = S3ActionParams(a=1.0, b=1.0, lam=np.array([1.0, 1.0, 1.0]))
    rep = min_curvature(LeftInvariantMetric(g4, s3_action_phi(p)), LIGHT, seed=5)
    assert rep.verdict == VERDICT_NONNEGATIVE
    assert rep.min_value >= -1e-9


def test_negative_witness_reproduces_in_isolation(g4):
    m = LeftInvariantMetric(g4, np.diag([1.5, 1, 1, 1, 1, 1.0]))
    rep = min_curvature(m, LIGHT, seed=6)
    assert rep.verdict == VERDICT_NEGATIVE
    w = np.array(rep.witness)
    again = normalized_curvature(m, w[0], w[1])
    assert again < -1e-9
    assert abs(again - rep.min_value) < 1e-10 * (1.0 + abs(rep.min_value))


def test_min_curvature_deterministic_across_workers(g4):
    m = LeftInvariantMetric(g4, np.diag([1.4, 1, 1, 1, 1, 1.0]))
    a = min_curvature(m, LIGHT, seed=7, workers=1)
    b = min_curvature(m, LIGHT, seed=7, workers=4)
    assert a == b


def test_infinitesimal_torus_flat(g4):
    rep = infinitesimal_check(g4, torus_psi(0.9, -0.3, 0.2, 1.4, 0.6), LIGHT, seed=8)
    assert rep.verdict == VERDICT_NONNEGATIVE
    assert abs(rep.min_value) < 1e-9


def test_infinitesimal_enlarging_diagonal_negative(g4):
    from liecurv import diagonal_subalgebra

    rep = infinitesimal_check(g4, diagonal_subalgebra(g4).projector, LIGHT, seed=9)
    assert rep.verdict == VERDICT_NEGATIVE
    assert abs(rep.min_value + 0.75) < 1e-6  # -6 * max |[x^h, y^h]|^2 = -3/4
    assert rep.small_t is not None
    for t, val in rep.small_t:
        assert val < 0.0


def test_infinitesimal_quotient_family_nonnegative(g4):
    psi = s3_action_psi(0.0, 0.0, np.array([1.0, 1.0, 4.0 / 3.0]))
    rep = infinitesimal_check(g4, psi, LIGHT, seed=10)
    assert rep.verdict == VERDICT_NONNEGATIVE
    assert rep.min_value >= -1e-9


def test_infinitesimal_quotient_family_random_parameters(g4):
    # valid lambda triples are eigenvalue sets of nonnegatively curved
    # 3-dim metrics; any alpha, beta below 1 then keep the variation flat
    # or better on commuting pairs
    from liecurv.suites import berger_triple

    rng = np.random.default_rng(30)
    for _ in range(5):
        psi = s3_action_psi(
            rng.uniform(-1.0, 0.9), rng.uniform(-1.0, 0.9), berger_triple(rng)
        )
        rep = infinitesimal_check(g4, psi, Budget(512, 8, 60), seed=31)
        assert rep.min_value >= -1e-9


def test_quotient_eigenvalue_paths_nonnegative_on_so3(g3):
    # the 3-dim inverse-linear family stays positive and verifies nonnegative;
    # lambda must itself be the eigenvalue set of a nonnegatively curved
    # metric (a berger triple here) for the family construction to apply
    from liecurv import inverse_linear_eigs_s3
    from liecurv.suites import berger_triple

    rng = np.random.default_rng(32)
    for _ in range(5):
        alpha = rng.uniform(-1.5, 0.95)
        lam = berger_triple(rng)
        for t in (0.3, 0.9):
            eigs = inverse_linear_eigs_s3(alpha, lam, t)
            m = LeftInvariantMetric(g3, np.diag(eigs))
            rep = min_curvature(m, Budget(256, 6, 50), seed=33)
            assert rep.verdict == VERDICT_NONNEGATIVE
            assert rep.min_value >= -1e-9


def test_infinitesimal_witness_reproduces(g4):
    from liecurv import diagonal_subalgebra

    psi = diagonal_subalgebra(g4).projector
    rep = infinitesimal_check(g4, psi, LIGHT, seed=11)
    w = np.array(rep.witness)
    assert abs(kappa_third_deriv(g4, psi, w[0], w[1]) - rep.min_value) < 1e-12


def test_eigenstructure_clustering():
    es = eigenstructure(np.eye(6))
    assert len(es.eigenspaces) == 1
    assert abs(es.eigenvalues[0] - 1.0) < 1e-15
    assert es.smallest.shape == (6, 6)

    m = torus_psi(0.2, 3.0, 1.0, 2.0, 0.0)
    es = eigenstructure(m)
    assert abs(es.eigenvalues[0] - 0.2) < 1e-15
    assert es.smallest.shape == (6, 2)

    near = np.diag([1.0, 1.0 + 1e-12, 2.0, 2.0, 2.0, 3.0])
    es = eigenstructure(near)
    assert [s.shape[1] for s in es.eigenspaces] == [2, 3, 1]


def test_eigenstructure_spaces_orthogonal_and_invariant(g4):
    rng = np.random.default_rng(12)
    psi = random_symmetric(rng, 6)
    es = eigenstructure(psi)
    for i, space in enumerate(es.eigenspaces):
        resid = psi @ space - es.eigenvalues[i] * space
        assert np.abs(resid).max() < 1e-8
        for other in es.eigenspaces[i + 1:]:
            assert np.abs(space.T @ other).max() < 1e-10


def test_lemma_k_torus_and_scalar_pass(g4):
    rep = lemma_k_check(g4, torus_psi(-0.5, 0.8, 0.1, 0.9, 0.4), n=100, seed=13)
    assert rep.passed and rep.samples > 0
    rep = lemma_k_check(g4, 0.7 * np.eye(6), n=50, seed=14)
    assert rep.passed
    assert rep.max_residual < 1e-12


def test_lemma_k_projection_passes_despite_negative_variation(g4):
    """Projections onto subalgebras satisfy the generation property even when
    the enlarging variation picks up negative curvature: for x orthogonal to
    the subalgebra, [x, y^h] stays orthogonal to it by invariance of the
    inner product, so the check is one-directional by design."""
    from liecurv import diagonal_subalgebra

    proj = diagonal_subalgebra(g4).projector
    assert lemma_k_check(g4, proj, n=100, seed=23).passed
    assert infinitesimal_check(g4, proj, LIGHT, seed=23).verdict == VERDICT_NEGATIVE


def test_lemma_k_detects_constructed_failure(g4):
    # smallest eigenspace is span{A1}; psi maps its commuting partner B1 to
    # 3 B1 + A2, and [A1, A2] = A3 escapes the eigenspace
    psi = np.diag([0.0, 2.0, 2.0, 3.0, 3.0, 3.0])
    psi[1, 3] = psi[3, 1] = 1.0
    rep = lemma_k_check(g4, psi, n=200, seed=15)
    assert not rep.passed
    assert rep.max_residual > 1e-3
    # and consistently, the variation fails the infinitesimal test
    inf = infinitesimal_check(g4, psi, LIGHT, seed=15)
    assert inf.verdict == VERDICT_NEGATIVE


def test_infinitesimal_pass_implies_lemma_k_pass(g4):
    rng = np.random.default_rng(16)
    checked = 0
    for _ in range(40):
        psi = random_symmetric(rng, 6)
        rep = infinitesimal_check(g4, psi, Budget(256, 6, 40), seed=17)
        if rep.verdict == VERDICT_NONNEGATIVE:
            assert lemma_k_check(g4, psi, n=60, seed=18).passed
            checked += 1
    for psi in (
        torus_psi(0.3, 0.6, 0.2, 0.5, 0.3),
        s3_action_psi(0.2, -0.4, np.array([0.7, 1.0, 1.3])),
    ):
        assert lemma_k_check(g4, psi, n=100, seed=19).passed
        checked += 1
    assert checked >= 2


def test_path_scan_family_and_failure(g4):
    psi = s3_action_psi(0.0, 0.0, np.array([1.0, 1.0, 1.25]))
    reports = path_scan(g4, psi, [0.25, 0.75, 1.5], budget=LIGHT, seed=20)
    assert all(r.verdict == VERDICT_NONNEGATIVE for r in reports)
    assert [r.t for r in reports] == [0.25, 0.75, 1.5]
    assert len({r.seed for r in reports}) == 3  # derived per-time seeds

    from liecurv import diagonal_subalgebra

    proj = diagonal_subalgebra(g4).projector
    reports = path_scan(g4, proj, [0.05, 0.2], budget=LIGHT, seed=21)
    assert any(r.verdict == VERDICT_NEGATIVE for r in reports)


def test_path_scan_rejects_out_of_horizon(g4):
    from liecurv import factor_subalgebra

    proj = factor_subalgebra(g4, 1).projector
    with pytest.raises(HorizonExceeded):
        path_scan(g4, proj, [0.5, 1.0], budget=LIGHT, seed=22)


def test_derived_seeds_are_stable():
    assert derived_seed(7, 0) == derived_seed(7, 0)
    assert derived_seed(7, 0) != derived_seed(7, 1)
    assert derived_seed(7, 3) == derived_seed(7, 3)
