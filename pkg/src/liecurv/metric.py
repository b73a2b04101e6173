"""Left-invariant metrics and two independent sectional-curvature routes.

A left-invariant metric is encoded by a symmetric positive-definite
endomorphism ``phi`` with h(a, b) = <phi a, b> relative to the algebra's
bi-invariant inner product.  Curvature is computed two ways:

* ``puttmann_curvature`` -- a closed-form expression in phi, its inverse and
  brackets (the production path, also available row-vectorized);
* ``koszul_oracle`` -- an independent first-principles route that assembles
  the Levi-Civita connection on a left-invariant frame from the Koszul
  formula and contracts the curvature tensor.

Both return the unnormalized sectional curvature <R(z1, z2) z2, z1>_h;
``normalized_curvature`` divides by the h-Gram determinant of the plane so
that the value depends only on span{z1, z2}.
"""

from __future__ import annotations

import numpy as np

from .algebra import LieAlgebra
from .errors import DegeneratePlane, DimensionMismatch, NotPositiveDefinite

__all__ = [
    "LeftInvariantMetric",
    "b_term",
    "puttmann_curvature",
    "puttmann_curvature_many",
    "koszul_oracle",
    "normalized_curvature",
    "normalized_curvature_many",
]

_SYMMETRY_TOL = 1e-12
# smallest eigenvalue must exceed this fraction of the largest
_DEFINITENESS_GATE = 1e-12
_GRAM_TOL = 1e-14


class LeftInvariantMetric:
    """h(a, b) = <phi a, b> for a symmetric positive-definite phi.

    The eigendecomposition of phi is computed once at construction and used
    for all inverse applications, which keeps the curvature formula stable
    when phi approaches the positive-definiteness boundary.
    """

    def __init__(self, algebra: LieAlgebra, phi):
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (algebra.dim, algebra.dim):
            raise DimensionMismatch(
                f"phi must be {algebra.dim}x{algebra.dim}, got {phi.shape}"
            )
        if np.abs(phi - phi.T).max() > _SYMMETRY_TOL * max(1.0, np.abs(phi).max()):
            raise ValueError("phi is not symmetric")
        phi = 0.5 * (phi + phi.T)
        w, v = np.linalg.eigh(phi)
        if w[-1] <= 0.0 or w[0] <= _DEFINITENESS_GATE * w[-1]:
            raise NotPositiveDefinite(
                f"phi eigenvalues span [{w[0]:.3e}, {w[-1]:.3e}]"
            )
        self.algebra = algebra
        self.phi = phi
        self.eigenvalues = w
        self.eigenvectors = v
        self.phi.setflags(write=False)
        self._gamma = None

    def h(self, a, b) -> float:
        """Metric pairing h(a, b)."""
        a = self.algebra.check_vector(a)
        b = self.algebra.check_vector(b)
        return float(a @ self.phi @ b)

    def apply_rows(self, x: np.ndarray) -> np.ndarray:
        """phi applied to each row of x."""
        return x @ self.phi  # phi is symmetric

    def inv_apply_rows(self, x: np.ndarray) -> np.ndarray:
        """phi^{-1} applied to each row of x, via the eigendecomposition."""
        return ((x @ self.eigenvectors) / self.eigenvalues) @ self.eigenvectors.T

    def connection(self) -> np.ndarray:
        """Levi-Civita coefficients gamma[i, j, m] with D_{e_i} e_j = gamma[i,j,m] e_m.

        Built from the Koszul formula, using that brackets and metric values
        of left-invariant fields are constant. Cached after first use.
        """
        if self._gamma is None:
            c = self.algebra.structure
            g = self.phi
            rhs = (
                np.einsum("ijl,lk->ijk", c, g)
                - np.einsum("jkl,li->ijk", c, g)
                + np.einsum("kil,lj->ijk", c, g)
            )
            d = self.algebra.dim
            gamma = 0.5 * np.linalg.solve(g, rhs.reshape(d * d, d).T).T
            self._gamma = gamma.reshape(d, d, d)
        return self._gamma


def b_term(m: LeftInvariantMetric, z1, z2) -> np.ndarray:
    """The symmetric bilinear term (1/2)([z1, phi z2] + [z2, phi z1])."""
    g = m.algebra
    z1 = g.check_vector(z1)
    z2 = g.check_vector(z2)
    return 0.5 * (g.bracket(z1, m.phi @ z2) + g.bracket(z2, m.phi @ z1))


def puttmann_curvature_many(m: LeftInvariantMetric, z1s: np.ndarray, z2s: np.ndarray) -> np.ndarray:
    """Unnormalized sectional curvature, row-vectorized over (n, dim) stacks."""
    g = m.algebra
    pz1 = m.apply_rows(z1s)
    pz2 = m.apply_rows(z2s)
    lie = g.bracket_many(z1s, z2s)
    br_pz1_z2 = g.bracket_many(pz1, z2s)
    br_z1_pz2 = g.bracket_many(z1s, pz2)
    term1 = 0.5 * np.einsum("nk,nk->n", br_pz1_z2 + br_z1_pz2, lie)
    term2 = -0.75 * np.einsum("nk,nk->n", m.apply_rows(lie), lie)
    b12 = 0.5 * (br_z1_pz2 - br_pz1_z2)  # [z2, phi z1] = -[phi z1, z2]
    b11 = g.bracket_many(z1s, pz1)
    b22 = g.bracket_many(z2s, pz2)
    term3 = np.einsum("nk,nk->n", b12, m.inv_apply_rows(b12))
    term4 = -np.einsum("nk,nk->n", b11, m.inv_apply_rows(b22))
    return term1 + term2 + term3 + term4


def puttmann_curvature(m: LeftInvariantMetric, z1, z2) -> float:
    """Unnormalized sectional curvature of the pair (z1, z2) under the metric.

    Symmetric in its arguments and biquadratic under scaling of either one.
    """
    z1 = m.algebra.check_vector(z1)
    z2 = m.algebra.check_vector(z2)
    return float(puttmann_curvature_many(m, z1[None, :], z2[None, :])[0])


def koszul_oracle(m: LeftInvariantMetric, z1, z2) -> float:
    """Curvature from first principles: connection coefficients, then
    <R(z1, z2) z2, z1>_h with R(x, y) = D_x D_y - D_y D_x - D_[x,y].

    Deliberately shares nothing with ``puttmann_curvature`` beyond the
    bracket; used to cross-validate it.
    """
    g = m.algebra
    z1 = g.check_vector(z1)
    z2 = g.check_vector(z2)
    gamma = m.connection()

    def nabla(u, v):
        return np.einsum("i,j,ijm->m", u, v, gamma)

    r = (
        nabla(z1, nabla(z2, z2))
        - nabla(z2, nabla(z1, z2))
        - nabla(g.bracket(z1, z2), z2)
    )
    return float(r @ m.phi @ z1)


def normalized_curvature_many(m: LeftInvariantMetric, z1s: np.ndarray, z2s: np.ndarray) -> np.ndarray:
    """Plane-invariant curvature, row-vectorized. No degeneracy guard."""
    k = puttmann_curvature_many(m, z1s, z2s)
    pz1 = m.apply_rows(z1s)
    pz2 = m.apply_rows(z2s)
    g11 = np.einsum("nk,nk->n", pz1, z1s)
    g22 = np.einsum("nk,nk->n", pz2, z2s)
    g12 = np.einsum("nk,nk->n", pz1, z2s)
    return k / (g11 * g22 - g12 * g12)


def normalized_curvature(m: LeftInvariantMetric, z1, z2) -> float:
    """Sectional curvature of the plane span{z1, z2}.

    Divides the unnormalized value by the h-Gram determinant, so the result
    is invariant under change of basis of the plane.

    Raises:
        DegeneratePlane: if the h-Gram determinant is below 1e-14.
    """
    z1 = m.algebra.check_vector(z1)
    z2 = m.algebra.check_vector(z2)
    g11 = m.h(z1, z1)
    g22 = m.h(z2, z2)
    g12 = m.h(z1, z2)
    gram = g11 * g22 - g12 * g12
    if gram < _GRAM_TOL:
        raise DegeneratePlane(f"h-Gram determinant {gram:.3e}")
    return puttmann_curvature(m, z1, z2) / gram
