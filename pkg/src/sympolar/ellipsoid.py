"""Ellipsoids {z : Q(z - c).(z - c) <= hbar} and their polar-duality geometry."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from .errors import DimensionError, NotPositiveDefiniteError, RankError, UnsupportedError
from .symplectic import check_pd, half_dim, standard_J

CENTER_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The set ``{z : Q (z - center) . (z - center) <= hbar}``.

    ``Q`` must be symmetric positive definite and ``hbar > 0``. ``center``
    defaults to the origin.
    """

    Q: np.ndarray
    center: np.ndarray = None
    hbar: float = 1.0

    def __post_init__(self):
        Q = check_pd(self.Q, name="Q")
        d = Q.shape[0]
        c = np.zeros(d) if self.center is None else np.array(self.center, dtype=float).reshape(-1)
        if c.shape != (d,):
            raise DimensionError(f"center has length {c.size}, expected {d}")
        if not np.all(np.isfinite(c)):
            raise DimensionError("center has non-finite entries")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise NotPositiveDefiniteError(f"hbar must be positive, got {self.hbar}")
        object.__setattr__(self, "Q", _frozen(Q))
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def dim(self):
        return self.Q.shape[0]

    @property
    def is_centered(self):
        scale = np.sqrt(self.hbar / np.linalg.eigvalsh(self.Q)[-1])
        return bool(np.max(np.abs(self.center), initial=0.0) <= CENTER_TOL * max(scale, 1.0))

    def image(self, L, translation=None):
        """Image ``L(E) + translation`` under an invertible linear map."""
        L = np.asarray(L, dtype=float)
        Linv = np.linalg.inv(L)
        c = L @ self.center
        if translation is not None:
            c = c + np.asarray(translation, dtype=float)
        return Ellipsoid(Linv.T @ self.Q @ Linv, c, self.hbar)

    def scaled(self, factor):
        """Dilation by ``factor > 0`` about the center."""
        return Ellipsoid(self.Q / factor**2, self.center, self.hbar)

    def contains_point(self, z, tol=0.0):
        u = np.asarray(z, dtype=float) - self.center
        return bool(u @ self.Q @ u <= self.hbar * (1 + tol))

    def normalized_radius(self, z):
        """``sqrt(Q(z-c).(z-c) / hbar)``; points of the boundary give 1."""
        u = np.atleast_2d(np.asarray(z, dtype=float) - self.center)
        r = np.sqrt(np.einsum("ki,ij,kj->k", u, self.Q, u) / self.hbar)
        return r if np.ndim(z) > 1 else float(r[0])


def ball(dim, radius=None, hbar=1.0, center=None):
    """Euclidean ball; the default radius is ``sqrt(hbar)``."""
    r2 = hbar if radius is None else radius**2
    return Ellipsoid(np.eye(dim) * hbar / r2, center, hbar)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of R^d given by an orthonormal basis (columns).

    The input columns are orthonormalized by QR with a positive-diagonal
    convention, so the orientation of the input frame is kept.
    """

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.ndim != 2 or B.shape[1] > B.shape[0] or B.shape[1] == 0:
            raise DimensionError(f"basis must be d x k with 1 <= k <= d, got {B.shape}")
        B = orthonormalize(B)
        object.__setattr__(self, "basis", _frozen(B))

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def projector(self):
        return self.basis @ self.basis.T

    def transform(self, L):
        """Image subspace ``L(F)``."""
        return Subspace(np.asarray(L, dtype=float) @ self.basis)


def orthonormalize(B, rank_tol=1e-12):
    """QR orthonormalization keeping orientation (positive diagonal of R)."""
    B = np.asarray(B, dtype=float)
    q, r = np.linalg.qr(B)
    d = np.diag(r)
    scale = max(np.max(np.abs(d)), 1e-300)
    if np.any(np.abs(d) <= rank_tol * scale) or not np.all(np.isfinite(q)):
        raise RankError("basis is rank deficient")
    return q * np.sign(d)


def coordinate_subspace(dim, indices):
    return Subspace(np.eye(dim)[:, list(indices)])


def _require_centered(E, what):
    if not E.is_centered:
        raise UnsupportedError(f"{what} is only defined here for centered ellipsoids")


def polar_dual(E):
    """Polar dual ``{p : p.z <= hbar for all z in E}``; shape ``Q^{-1}``."""
    _require_centered(E, "polar duality")
    return Ellipsoid(np.linalg.inv(E.Q), None, E.hbar)


def symplectic_polar_dual(E):
    """Symplectic polar dual ``{w : sigma(z, w) <= hbar for all z in E}``.

    Its shape is ``-J Q^{-1} J``; equivalently it is J applied to the
    ordinary polar dual.
    """
    n = half_dim(E.Q)
    _require_centered(E, "symplectic polar duality")
    J = standard_J(n)
    return Ellipsoid(-J @ np.linalg.inv(E.Q) @ J, None, E.hbar)


def project(E, F):
    """Orthogonal projection of E onto F, in F's basis coordinates.

    The support function of the shadow along ``B y`` is that of E, so the
    shape is ``(B^T Q^{-1} B)^{-1}``.
    """
    _require_centered(E, "projection")
    B = F.basis
    if B.shape[0] != E.dim:
        raise DimensionError("subspace and ellipsoid live in different dimensions")
    return Ellipsoid(np.linalg.inv(B.T @ np.linalg.inv(E.Q) @ B), None, E.hbar)


def intersect_subspace(E, F):
    """Section of E by F, in F's basis coordinates: shape ``B^T Q B``."""
    _require_centered(E, "intersection with a subspace")
    B = F.basis
    if B.shape[0] != E.dim:
        raise DimensionError("subspace and ellipsoid live in different dimensions")
    return Ellipsoid(B.T @ E.Q @ B, None, E.hbar)


def plane_section_area(E, F):
    """Euclidean area of the section of E by the 2-plane F."""
    if F.dim != 2:
        raise DimensionError("F must be two-dimensional")
    sec = intersect_subspace(E, F)
    return float(np.pi * E.hbar / np.sqrt(np.linalg.det(sec.Q)))


def plane_section_symplectic_area(E, F):
    """Signed symplectic area of the section of E by the 2-plane F.

    With the orthonormal basis (u, v) of F this is ``omega(u, v) * area`` where
    ``omega(u, v) = u^T J v`` is the integral of ``dx ^ dp`` over the unit
    square of the frame; for the (x_1, p_1) plane omega = 1 and the value is
    the action of the section ellipse traversed along the Hamiltonian flow.
    Null (isotropic) planes give 0.
    """
    n = half_dim(E.Q)
    area = plane_section_area(E, F)
    u, v = F.basis[:, 0], F.basis[:, 1]
    omega = float(u @ standard_J(n) @ v)
    return omega * area


def volume(E):
    """Volume ``(pi hbar)^{d/2} / Gamma(d/2 + 1) * det(Q)^{-1/2}``."""
    d = E.dim
    _, logdet = np.linalg.slogdet(E.Q)
    logv = 0.5 * d * np.log(np.pi * E.hbar) - gammaln(0.5 * d + 1) - 0.5 * logdet
    return float(np.exp(logv))


def mahler_volume(E):
    """Volume product ``Vol(E) * Vol(E^hbar)``."""
    return volume(E) * volume(polar_dual(E))


def ball_volume(dim, hbar=1.0):
    """Volume of the ball of radius sqrt(hbar)."""
    return float(np.exp(0.5 * dim * np.log(np.pi * hbar) - gammaln(0.5 * dim + 1)))


def _product_normalizer(E1, E2):
    for E in (E1, E2):
        _require_centered(E, "John/Loewner ellipsoid of a product")
    if E1.dim != E2.dim:
        raise DimensionError("factors must have the same dimension")
    if not np.isclose(E1.hbar, E2.hbar, rtol=1e-12, atol=0.0):
        raise DimensionError("factors must share the same hbar")
    return linalg.block_diag(E1.Q, E2.Q), E1.hbar


def john_of_product(E1, E2):
    """Maximal-volume ellipsoid inscribed in ``E1 x E2``.

    The block map ``diag(L1, L2)`` sending ``B(1) x B(1)`` onto the product
    sends the inscribed unit ball to the answer, giving shape
    ``diag(Q1, Q2)`` at the common level hbar.
    """
    Q, hbar = _product_normalizer(E1, E2)
    return Ellipsoid(Q, None, hbar)


def loewner_of_product(E1, E2):
    """Minimal-volume ellipsoid containing ``E1 x E2``.

    For ``B(R) x B(R)`` this is the ball of radius ``sqrt(2) R`` (the set is
    invariant under ``O(n) x O(n)`` and the swap, so the answer is a ball,
    and it must reach the corner points at distance ``sqrt(2) R``).
    Covariance under block-diagonal maps gives shape ``diag(Q1, Q2) / 2``.
    """
    Q, hbar = _product_normalizer(E1, E2)
    return Ellipsoid(0.5 * Q, None, hbar)


def contains(E1, E2, tol=1e-9):
    """True iff ``E2`` is a subset of ``E1`` (both with the same center).

    Uses the generalized eigenvalues ``mu`` of ``(Q2/hbar2, Q1/hbar1)``:
    ``E2 subset E1`` iff ``Q2/hbar2 >= Q1/hbar1`` iff ``min mu >= 1``.
    """
    if E1.dim != E2.dim:
        raise DimensionError("ellipsoids live in different dimensions")
    if np.max(np.abs(E1.center - E2.center), initial=0.0) > CENTER_TOL * (1 + np.max(np.abs(E1.center))):
        raise UnsupportedError("containment test requires a common center")
    mu = linalg.eigh(E2.Q / E2.hbar, E1.Q / E1.hbar, eigvals_only=True)
    return bool(mu[0] >= 1.0 - tol)
