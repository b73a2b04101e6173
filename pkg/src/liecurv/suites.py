"""Named verification suites: each re-derives a set of published identities
or behaviors numerically and reports one residual row per check.

A row passes when its value is at or below its tolerance.  Suite names are
stable CLI tokens; descriptions say what is being checked.  Budgets are
sized so every suite finishes in well under a minute on one core.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import families
from .algebra import diagonal_subalgebra, factor_subalgebra, so4
from .metric import normalized_curvature
from .normalform import NormalFormParams, normal_form_kappa3
from .variation import (
    InverseLinearPath,
    k_of_t,
    k_second_deriv,
    kappa_of_t,
    kappa_third_deriv,
    default_step,
    refined_derivative,
)
from .verify import Budget, infinitesimal_check, path_scan, sample_commuting_pairs

__all__ = ["SuiteRow", "SuiteResult", "SUITES", "run_suite", "list_suites"]


@dataclass(frozen=True)
class SuiteRow:
    name: str
    value: float
    tol: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "tol", float(self.tol))

    @property
    def passed(self) -> bool:
        return self.value <= self.tol

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "pass": self.passed}


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    rows: tuple[SuiteRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "pass": self.passed, "rows": [r.to_dict() for r in self.rows]}


def _unit_spectral(rng, d: int = 6) -> np.ndarray:
    m = rng.standard_normal((d, d))
    m = 0.5 * (m + m.T)
    return m / np.abs(np.linalg.eigvalsh(m)).max()


def _rel(err: float, ref: float, floor: float = 1e-3) -> float:
    return err / max(abs(ref), floor)


# ---------------------------------------------------------------------------
# derivative-formula suites

def _suite_k_derivatives(seed: int) -> list[SuiteRow]:
    g = so4()
    rng = np.random.default_rng(seed)
    pairs = sample_commuting_pairs(g, 60, seed)
    worst_fd1 = 0.0
    worst_rel = 0.0
    min_k2 = np.inf
    for pair in pairs:
        psi = _unit_spectral(rng)
        path = InverseLinearPath(g, psi)
        h = default_step(path)
        fd1 = refined_derivative(lambda t: k_of_t(path, pair.x, pair.y, t), 0.0, 1, h)
        fd2 = refined_derivative(lambda t: k_of_t(path, pair.x, pair.y, t), 0.0, 2, h)
        closed = k_second_deriv(g, psi, pair.x, pair.y)
        worst_fd1 = max(worst_fd1, abs(fd1))
        worst_rel = max(worst_rel, _rel(abs(fd2 - closed), closed))
        min_k2 = min(min_k2, closed)
    return [
        SuiteRow("first-derivative-vanishes", worst_fd1, 1e-6),
        SuiteRow("second-derivative-closed-vs-fd", worst_rel, 1e-5),
        SuiteRow("second-derivative-nonnegative", max(0.0, -min_k2), 0.0),
    ]


def _suite_kappa_derivatives(seed: int) -> list[SuiteRow]:
    g = so4()
    rng = np.random.default_rng(seed)
    pairs = sample_commuting_pairs(g, 60, seed)
    worst0 = worst1 = worst2 = worst_rel = 0.0
    for pair in pairs:
        psi = _unit_spectral(rng)
        path = InverseLinearPath(g, psi)
        h = default_step(path)
        f = lambda t: kappa_of_t(path, pair.x, pair.y, t)
        worst0 = max(worst0, abs(f(0.0)))
        worst1 = max(worst1, abs(refined_derivative(f, 0.0, 1, h)))
        worst2 = max(worst2, abs(refined_derivative(f, 0.0, 2, h)))
        closed = kappa_third_deriv(g, psi, pair.x, pair.y)
        fd3 = refined_derivative(f, 0.0, 3, h)
        worst_rel = max(worst_rel, _rel(abs(fd3 - closed), closed))
    return [
        SuiteRow("curve-vanishes-at-0", worst0, 1e-12),
        SuiteRow("first-derivative-vanishes", worst1, 1e-6),
        SuiteRow("second-derivative-vanishes", worst2, 1e-6),
        SuiteRow("third-derivative-closed-vs-fd", worst_rel, 1e-4),
    ]


# ---------------------------------------------------------------------------
# projection-variation suites

def _suite_shrink_subalgebra(seed: int) -> list[SuiteRow]:
    g = so4()
    rows = []
    for name, sub in (("factor", factor_subalgebra(g, 1)), ("diagonal", diagonal_subalgebra(g))):
        psi = -sub.projector
        worst = 0.0
        for pair in sample_commuting_pairs(g, 100, seed):
            xh = sub.projector @ pair.x
            yh = sub.projector @ pair.y
            target = 6.0 * float(np.dot(g.bracket(xh, yh), g.bracket(xh, yh)))
            got = kappa_third_deriv(g, psi, pair.x, pair.y)
            worst = max(worst, abs(got - target) / max(abs(target), 1e-9))
        rows.append(SuiteRow(f"third-derivative-identity-{name}", worst, 1e-8))
        rows.append(_eschenburg_row(g, sub, name, seed))
    return rows


def _eschenburg_row(g, sub, name: str, seed: int) -> SuiteRow:
    """Zero-curvature classification of twisted planes at t in {0.25, 0.5}.

    A twisted commuting plane is flat exactly when the subalgebra parts of
    the pair also commute; the row counts misclassifications against that
    rule over 200 sampled pairs, split between the two cases.
    """
    psi = -sub.projector
    path = InverseLinearPath(g, psi)
    rng = np.random.default_rng(seed)
    mis = 0
    checked = 0
    while checked < 200:
        a = rng.standard_normal(3)
        a /= np.linalg.norm(a)
        if checked % 2 == 0:
            b = a.copy()  # forces the subalgebra parts to commute
        else:
            b = rng.standard_normal(3)
            b /= np.linalg.norm(b)
        x = g.embed_factor(a, 1)
        y = g.embed_factor(b, 2)
        xh = sub.projector @ x
        yh = sub.projector @ y
        flat_expected = np.linalg.norm(g.bracket(xh, yh)) < 1e-8
        if not flat_expected and np.linalg.norm(g.bracket(xh, yh)) < 0.05:
            continue  # keep the nonzero class well separated
        for t in (0.25, 0.5):
            m = np.eye(6) - t * psi
            metric = path.metric_at(t)
            val = normalized_curvature(metric, m @ x, m @ y)
            if (val < 1e-10) != flat_expected:
                mis += 1
        checked += 1
    return SuiteRow(f"flat-plane-classification-{name}", float(mis), 0.0)


def _suite_enlarge_subalgebra(seed: int) -> list[SuiteRow]:
    g = so4()
    sub = diagonal_subalgebra(g)
    psi = sub.projector
    report = infinitesimal_check(g, psi, budget=Budget(1024, 16, 120), seed=seed)
    # the worst commuting pair has orthogonal unit factor parts, giving
    # |[x^h, y^h]|^2 = 1/8 and a third derivative of -6/8
    target = -0.75
    rows = [
        SuiteRow(
            "min-third-derivative-vs-closed-form",
            abs(report.min_value - target) / abs(target),
            1e-6,
        )
    ]
    a = np.array([1.0, 0.0, 0.0])
    b = np.array([0.0, 1.0, 0.0])
    abelian = np.outer(g.embed_factor(a, 1), g.embed_factor(a, 1)) + np.outer(
        g.embed_factor(b, 2), g.embed_factor(b, 2)
    )
    worst = 0.0
    for pair in sample_commuting_pairs(g, 100, seed):
        worst = max(worst, abs(kappa_third_deriv(g, abelian, pair.x, pair.y)))
    rows.append(SuiteRow("abelian-subalgebra-flat", worst, 1e-9))
    return rows


# ---------------------------------------------------------------------------
# family suites

def _suite_family_consistency(seed: int) -> list[SuiteRow]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        alpha, beta = rng.uniform(-1.5, 0.9, size=2)
        lam = rng.uniform(0.3, 3.0, size=3)
        cap = min(
            1.0 / alpha if alpha > 0 else np.inf,
            1.0 / beta if beta > 0 else np.inf,
            2.0,
        )
        t = rng.uniform(0.05, 0.95) * cap
        worst = max(worst, families.s3_action_path_residual(alpha, beta, lam, t))
    return [SuiteRow("path-equals-family-member", worst, 1e-10)]


def berger_triple(rng) -> np.ndarray:
    """Eigenvalues of a nonnegatively curved 3-dim metric: a Berger triple
    (two equal entries, third at most 4/3 of them), scaled and permuted."""
    ratio = rng.uniform(0.2, 4.0 / 3.0)
    scale = rng.uniform(0.5, 2.0)
    vals = scale * np.array([ratio, 1.0, 1.0])
    return vals[rng.permutation(3)]


def _rotation3(rng) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    return q


def random_product_params(rng) -> families.ProductParams:
    blocks = []
    for _ in range(2):
        eigs = families.s3_quotient_eigenvalues(rng.uniform(0.5, 2.0), berger_triple(rng))
        q = _rotation3(rng)
        blocks.append(q @ np.diag(eigs) @ q.T)
    return families.ProductParams(phi1=blocks[0], phi2=blocks[1])


def random_torus_params(rng) -> families.TorusParams:
    c, d = rng.uniform(0.5, 2.0, size=2)
    top = (4.0 / 3.0) * min(c, d)
    eigs = rng.uniform(0.2, 0.98, size=2) * top
    theta = rng.uniform(0.0, np.pi)
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    tau = rot @ np.diag(eigs) @ rot.T
    return families.TorusParams(c=c, d=d, tau_block=tau)


def random_s3_action_params(rng) -> families.S3ActionParams:
    return families.S3ActionParams(
        a=rng.uniform(0.5, 2.0), b=rng.uniform(0.5, 2.0), lam=berger_triple(rng)
    )


def family_scan_cases(rng, kind: str):
    """(psi, t_cap) pairs whose inverse-linear paths stay in the family.

    Product and torus paths target the drawn family metric at t=1; the
    quotient family uses its own variation derivative, valid while both
    1 - alpha t and 1 - beta t stay positive.
    """
    if kind == "product":
        h = families.product_phi(random_product_params(rng))
        return np.eye(6) - np.linalg.inv(h), 1.0
    if kind == "torus":
        h = families.torus_phi(random_torus_params(rng))
        return np.eye(6) - np.linalg.inv(h), 1.0
    if kind == "s3-action":
        alpha, beta = rng.uniform(-1.0, 0.9, size=2)
        lam = berger_triple(rng)
        cap = min(
            1.0 / alpha if alpha > 0 else np.inf,
            1.0 / beta if beta > 0 else np.inf,
            2.0,
        )
        return families.s3_action_psi(alpha, beta, lam), 0.9 * cap
    raise ValueError(f"unknown family kind: {kind}")


def _suite_invariant_planes(seed: int) -> list[SuiteRow]:
    g = so4()
    rng = np.random.default_rng(seed)
    rows = []
    worst = 0.0
    for _ in range(20):
        p = random_product_params(rng)
        worst = max(
            worst,
            families.invariant_abelian_residual(
                g, families.product_phi(p), families.product_invariant_planes(p)
            ),
        )
    rows.append(SuiteRow("product-planes", worst, 1e-12))
    worst = 0.0
    for _ in range(20):
        p = random_torus_params(rng)
        worst = max(
            worst,
            families.invariant_abelian_residual(
                g, families.torus_phi(p), families.torus_invariant_planes(p)
            ),
        )
    rows.append(SuiteRow("torus-planes", worst, 1e-12))
    worst = 0.0
    for _ in range(20):
        p = random_s3_action_params(rng)
        worst = max(
            worst,
            families.invariant_abelian_residual(
                g, families.s3_action_phi(p), families.s3_action_invariant_planes()
            ),
        )
    rows.append(SuiteRow("quotient-planes", worst, 1e-12))
    return rows


def _suite_family_paths(seed: int) -> list[SuiteRow]:
    g = so4()
    rng = np.random.default_rng(seed)
    budget = Budget(samples=256, restarts=6, iters=60)
    rows = []
    for kind in ("product", "torus", "s3-action"):
        lowest = np.inf
        negatives = 0
        for draw in range(2):
            psi, cap = family_scan_cases(rng, kind)
            grid = np.array([0.25, 0.5, 0.75]) * cap
            for rep in path_scan(g, psi, grid, budget=budget, seed=seed + draw):
                lowest = min(lowest, rep.min_value)
                negatives += int(rep.negative)
        rows.append(SuiteRow(f"{kind}-negatives", float(negatives), 0.0))
        rows.append(SuiteRow(f"{kind}-min-curvature", max(0.0, -lowest), 1e-9))
    return rows


# ---------------------------------------------------------------------------
# normal-form identity suite

_IDENTITY_CASES = [
    # name, x coefficients, y coefficients, closed form in the parameters
    ("mixed-pair-plus", (0, 1, 1), (1, 0, 0),
     lambda p: p.c3**2 * (p.a2 - p.b2) + 4 * p.a3**2 * p.lam),
    ("mixed-pair-minus", (0, -1, 1), (1, 0, 0),
     lambda p: p.c3**2 * (p.a2 - p.b2) - 4 * p.a3**2 * p.lam),
    ("swapped-pair-plus", (1, 0, 0), (0, 1, 1),
     lambda p: p.c3**2 * (p.a1 - p.b1) + 4 * p.a3**2 * p.mu),
    ("swapped-pair-minus", (1, 0, 0), (0, -1, 1),
     lambda p: p.c3**2 * (p.a1 - p.b1) - 4 * p.a3**2 * p.mu),
    ("single-pair-1", (0, 1, 0), (1, 0, 0),
     lambda p: p.a3**2 * (p.b1 - p.c1)),
    ("single-pair-2", (0, 0, 1), (1, 0, 0),
     lambda p: p.a3**2 * (p.c1 - p.b1) + p.c3**2 * (p.a2 - p.b2)),
    ("single-pair-3", (1, 0, 0), (0, 1, 0),
     lambda p: p.a3**2 * (p.b2 - p.c2)),
    ("single-pair-4", (1, 0, 0), (0, 0, 1),
     lambda p: p.c3**2 * (p.a1 - p.b1) + p.a3**2 * (p.c2 - p.b2)),
]

_SUM_CASES = [
    ("pair-sum-1", ((0, 0, 1), (0, 1, 0)), ((0, 0, 1), (0, 0, 1)),
     lambda p: p.c3**2 * (p.b2 - p.a2)),
    ("pair-sum-2", ((1, 0, 0), (0, 1, 0)), ((1, 0, 0), (0, 0, 1)),
     lambda p: p.c3**2 * (p.a1 - p.b1)),
]

_ELIMINATION_CASES = [
    ("elimination-1", (1, 1, 1), lambda p: p.a3 * p.c3 * (p.a3 + p.c3)),
    ("elimination-2", (-1, 1, 1), lambda p: p.a3 * p.c3 * (p.c3 - p.a3)),
    ("elimination-3", (1, -1, 1), lambda p: -p.a3 * p.c3 * (p.a3 + p.c3)),
    ("elimination-4", (1, 1, -1), lambda p: p.a3 * p.c3 * (p.a3 - p.c3)),
]


def _random_normal_form(rng) -> NormalFormParams:
    v = rng.uniform(-1.0, 1.0, size=10)
    return NormalFormParams(
        a1=v[0], a2=v[1], a3=v[2], b1=v[3], b2=v[4], b3=0.0,
        c1=v[5], c2=v[6], c3=v[7], lam=v[8], mu=v[9],
    )


def _constrained_normal_form(rng) -> NormalFormParams:
    p, q, a3, c3 = rng.uniform(-1.0, 1.0, size=4)
    return NormalFormParams(
        a1=p, a2=q, a3=a3, b1=p, b2=q, b3=0.0, c1=p, c2=q, c3=c3, lam=0.0, mu=0.0
    )


def bracket_identity_rows(seed: int, draws: int = 100) -> list[SuiteRow]:
    """Check the commuting-pair third-derivative identities of the normal form.

    A single positive proportionality constant is fitted once from the first
    identity and then asserted across every identity and draw; the fit
    accounts for the constant that relates the raw third derivative to the
    tabulated closed forms.
    """
    g = so4()
    rng = np.random.default_rng(seed)
    params = [_random_normal_form(rng) for _ in range(draws)]

    num = den = 0.0
    name0, xc0, yc0, closed0 = _IDENTITY_CASES[0]
    for p in params:
        lhs = normal_form_kappa3(g, p, xc0, yc0)
        rhs = closed0(p)
        num += lhs * rhs
        den += rhs * rhs
    const = num / den

    rows = [SuiteRow("constant-positive", max(0.0, -const), 0.0)]
    for name, xc, yc, closed in _IDENTITY_CASES:
        worst = 0.0
        for p in params:
            lhs = normal_form_kappa3(g, p, xc, yc)
            worst = max(worst, abs(lhs - const * closed(p)) / max(1.0, abs(lhs)))
        rows.append(SuiteRow(name, worst, 1e-10))
    for name, (xc1, yc1), (xc2, yc2), closed in _SUM_CASES:
        worst = 0.0
        for p in params:
            lhs = normal_form_kappa3(g, p, xc1, yc1) + normal_form_kappa3(g, p, xc2, yc2)
            worst = max(worst, abs(lhs - const * closed(p)) / max(1.0, abs(lhs)))
        rows.append(SuiteRow(name, worst, 1e-10))
    stratum = [_constrained_normal_form(rng) for _ in range(draws)]
    for name, signs, closed in _ELIMINATION_CASES:
        worst = 0.0
        for p in stratum:
            lhs = normal_form_kappa3(g, p, (1, 1, 1), signs)
            worst = max(worst, abs(lhs - const * closed(p)) / max(1.0, abs(lhs)))
        rows.append(SuiteRow(name, worst, 1e-10))
    return rows


def _suite_bracket_identities(seed: int) -> list[SuiteRow]:
    return bracket_identity_rows(seed)


# ---------------------------------------------------------------------------
# registry

SUITES: dict[str, tuple[str, callable]] = {
    "lemma-2.1-fd": (
        "fixed-plane curvature derivatives: k'(0)=0 and the closed form for k''(0)",
        _suite_k_derivatives,
    ),
    "lemma-2.2-fd": (
        "twisted-plane curvature derivatives up to the third-order closed form",
        _suite_kappa_derivatives,
    ),
    "example-2.3": (
        "shrinking a subalgebra: third-derivative identity and flat-plane classification",
        _suite_shrink_subalgebra,
    ),
    "example-2.4": (
        "enlarging a subalgebra: negative third derivative, flat for abelian subalgebras",
        _suite_enlarge_subalgebra,
    ),
    "eq-yy": (
        "inverse-linear path equals a family member at every admissible time",
        _suite_family_consistency,
    ),
    "th1-identities": (
        "normal-form third-derivative identities with one fitted constant",
        _suite_bracket_identities,
    ),
    "obs-3.1-planes": (
        "each family metric preserves three orthogonal abelian planes",
        _suite_invariant_planes,
    ),
    "obs-3.2-paths": (
        "family paths scan nonnegative at sampled times",
        _suite_family_paths,
    ),
}


def list_suites() -> list[dict]:
    return [{"suite": name, "description": desc} for name, (desc, _) in SUITES.items()]


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite: {name}")
    _, fn = SUITES[name]
    return SuiteResult(suite=name, rows=tuple(fn(seed)))
