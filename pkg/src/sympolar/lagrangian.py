"""Lagrangian frames, geometric quantum states and their Gaussian counterparts.

A geometric state is the product ``X_l x X_l'^hbar`` of a centered ellipsoid
``X_l`` carried by a Lagrangian plane ``l`` with its Lagrangian polar dual in a
transversal Lagrangian plane ``l'``, optionally translated by a center z0.
Every such state is ``S(B_X(sqrt(hbar)) x B_P(sqrt(hbar))) + z0`` for a
symplectic S, unique up to ``S -> S M_H`` with H orthogonal, and corresponds
to the generalized Gaussian whose Wigner matrix is ``(S S^T)^{-1}``.

Shape matrices on planes are expressed in the orthonormal basis each plane
carries.
"""

from dataclasses import dataclass

import numpy as np

from .ellipsoid import Ellipsoid, _frozen, contains, john_of_product, orthonormalize
from .errors import (
    ContainmentError,
    DimensionError,
    InvalidWignerError,
    IsotropyError,
    TransversalityError,
)
from .symplectic import (
    SP_TOL,
    check_pd,
    check_symmetric,
    half_dim,
    standard_J,
    symplectic_residual,
    sym_sqrt,
)

ISO_TOL = 1e-9
FRAME_TOL = 1e-8
CONTAIN_TOL = 1e-9


def symplectic_inverse(S):
    """``S^{-1} = -J S^T J`` for symplectic S."""
    J = standard_J(half_dim(S))
    return -J @ S.T @ J


@dataclass(frozen=True, eq=False)
class LagrangianPlane:
    """n-dimensional isotropic subspace of R^{2n}; ``basis`` is orthonormalized on construction."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != 2 * B.shape[1]:
            raise DimensionError(f"a Lagrangian plane basis is 2n x n, got {B.shape}")
        B = orthonormalize(B)
        J = standard_J(B.shape[1])
        if np.max(np.abs(B.T @ J @ B)) > ISO_TOL:
            raise IsotropyError("basis does not span a Lagrangian plane")
        object.__setattr__(self, "basis", _frozen(B))

    @property
    def n(self):
        return self.basis.shape[1]

    @property
    def projector(self):
        return self.basis @ self.basis.T

    def transform(self, S):
        return LagrangianPlane(np.asarray(S, dtype=float) @ self.basis)


def position_plane(n):
    return LagrangianPlane(np.eye(2 * n)[:, :n])


def momentum_plane(n):
    return LagrangianPlane(np.eye(2 * n)[:, n:])


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    """Pair of transversal Lagrangian planes ``(ell, ell_prime)``."""

    ell: LagrangianPlane
    ell_prime: LagrangianPlane

    def __post_init__(self):
        if self.ell.n != self.ell_prime.n:
            raise DimensionError("frame planes live in different dimensions")
        sv = np.linalg.svd(np.hstack([self.ell.basis, self.ell_prime.basis]), compute_uv=False)
        if sv[-1] < FRAME_TOL:
            raise TransversalityError(f"planes are not transversal (smallest singular value {sv[-1]:.2e})")

    @property
    def n(self):
        return self.ell.n

    @property
    def pairing(self):
        """``K = E^T J F`` for the orthonormal bases E of ell and F of ell_prime."""
        return self.ell.basis.T @ standard_J(self.n) @ self.ell_prime.basis

    def transform(self, S):
        return LagrangianFrame(self.ell.transform(S), self.ell_prime.transform(S))


def canonical_frame(n):
    return LagrangianFrame(position_plane(n), momentum_plane(n))


def frame_transport(frame):
    """Symplectic S mapping the canonical frame onto ``frame``.

    ``S = [E, F K^{-1}]`` with E, F the orthonormal plane bases and
    ``K = E^T J F``: the first block keeps E, the second is the basis of
    ``ell_prime`` dual to E under the pairing, so ``S^T J S = J``. Any other
    choice differs by a right factor ``M_L``.
    """
    E = frame.ell.basis
    F = frame.ell_prime.basis
    return np.hstack([E, F @ np.linalg.inv(frame.pairing)])


def _restricted_shape(S, basis, shape):
    """Shape of ``S(X)`` in the orthonormal basis of ``S(plane)``.

    Returns ``(new_basis, new_shape)`` where ``S @ basis = new_basis @ R``.
    """
    img = S @ basis
    Bn = orthonormalize(img)
    R = Bn.T @ img
    Ri = np.linalg.inv(R)
    new = Ri.T @ shape @ Ri
    return Bn, 0.5 * (new + new.T)


def _plane_shape(shape, n, name):
    shape = check_pd(shape, name=name)
    if shape.shape != (n, n):
        raise DimensionError(f"{name} must be {n} x {n}, got {shape.shape}")
    return _frozen(shape)


def _center(center, n):
    c = np.zeros(2 * n) if center is None else np.array(center, dtype=float).reshape(-1)
    if c.shape != (2 * n,) or not np.all(np.isfinite(c)):
        raise DimensionError(f"center must be a finite vector of length {2 * n}")
    return _frozen(c)


def _hbar(hbar):
    if not (np.isfinite(hbar) and hbar > 0):
        raise DimensionError(f"hbar must be positive, got {hbar}")
    return float(hbar)


@dataclass(frozen=True, eq=False)
class GeometricState:
    """Pure geometric state ``X_l x X_l'^hbar + center``.

    ``shape_x`` is the shape of ``X_l = {E y : shape_x y.y <= hbar}`` in the
    orthonormal basis E of ``frame.ell``.
    """

    frame: LagrangianFrame
    shape_x: np.ndarray
    center: np.ndarray = None
    hbar: float = 1.0

    def __post_init__(self):
        n = self.frame.n
        object.__setattr__(self, "shape_x", _plane_shape(self.shape_x, n, "shape_x"))
        object.__setattr__(self, "center", _center(self.center, n))
        object.__setattr__(self, "hbar", _hbar(self.hbar))

    @property
    def n(self):
        return self.frame.n


@dataclass(frozen=True, eq=False)
class MixedGeometricState:
    """Mixed geometric state ``X_l x P_l' + center`` with ``P_l'`` containing the dual of ``X_l``.

    ``shape_p`` is the shape of ``P_l'`` in the orthonormal basis of
    ``frame.ell_prime``.
    """

    frame: LagrangianFrame
    shape_x: np.ndarray
    shape_p: np.ndarray
    center: np.ndarray = None
    hbar: float = 1.0
    tol: float = CONTAIN_TOL

    def __post_init__(self):
        n = self.frame.n
        object.__setattr__(self, "shape_x", _plane_shape(self.shape_x, n, "shape_x"))
        object.__setattr__(self, "shape_p", _plane_shape(self.shape_p, n, "shape_p"))
        object.__setattr__(self, "center", _center(self.center, n))
        object.__setattr__(self, "hbar", _hbar(self.hbar))
        dual = lagrangian_polar_dual(self.shape_x, self.frame, self.hbar)
        if not contains(Ellipsoid(self.shape_p, None, self.hbar), dual, self.tol):
            raise ContainmentError("P does not contain the Lagrangian polar dual of X")

    @property
    def n(self):
        return self.frame.n


def lagrangian_polar_dual(shape_x, frame, hbar=1.0):
    """Lagrangian polar dual ``{z' in l' : sigma(z, z') <= hbar for all z in X_l}``.

    After transport to the canonical frame, ``X_l`` becomes ``{A x.x <= hbar}``
    in the position plane and its dual is ``{A^{-1} p.p <= hbar}`` in the
    momentum plane; transporting back to the orthonormal basis of ``l'`` gives
    the shape ``K^T A^{-1} K`` with ``K = E^T J F``.

    Returns
    -------
    Ellipsoid
        n-dimensional ellipsoid in ``l'`` coordinates.
    """
    A = _plane_shape(shape_x, frame.n, "shape_x")
    K = frame.pairing
    # frame_transport sends (0, w') to F K^{-1} w', i.e. F-coordinates w = K^{-1} w'
    dual_canonical = np.linalg.inv(A)
    shape = K.T @ dual_canonical @ K
    return Ellipsoid(0.5 * (shape + shape.T), None, hbar)


def act(S, state):
    """Image of a geometric state (pure or mixed) under a symplectic matrix."""
    return act_affine(S, None, state)


def act_affine(S, translation, state):
    """Image under the affine symplectic map ``z -> S z + translation``."""
    S = np.asarray(S, dtype=float)
    E2, A2 = _restricted_shape(S, state.frame.ell.basis, state.shape_x)
    F2 = orthonormalize(S @ state.frame.ell_prime.basis)
    frame = LagrangianFrame(LagrangianPlane(E2), LagrangianPlane(F2))
    c = S @ state.center
    if translation is not None:
        c = c + np.asarray(translation, dtype=float)
    if isinstance(state, MixedGeometricState):
        _, P2 = _restricted_shape(S, state.frame.ell_prime.basis, state.shape_p)
        return MixedGeometricState(frame, A2, P2, c, state.hbar, state.tol)
    return GeometricState(frame, A2, c, state.hbar)


def canonical_form(state):
    """Symplectic S with ``state = S(B_X(sqrt(hbar)) x B_P(sqrt(hbar))) + center``.

    ``S = S' diag(A^{-1/2}, A^{1/2})`` where S' is :func:`frame_transport`
    and A the position shape. The remaining ``O(n)`` freedom is fixed by the
    orthonormal plane bases (QR with positive diagonal) and the symmetric
    square root.
    """
    Sp = frame_transport(state.frame)
    Ah, Aih = sym_sqrt(state.shape_x)
    n = state.n
    Z = np.zeros((n, n))
    return Sp @ np.block([[Aih, Z], [Z, Ah]])


def from_canonical(S, center=None, hbar=1.0):
    """Geometric state ``S(B_X(sqrt(hbar)) x B_P(sqrt(hbar))) + center``."""
    S = np.asarray(S, dtype=float)
    n = half_dim(S)
    base = GeometricState(canonical_frame(n), np.eye(n), None, hbar)
    return act_affine(S, center, base)


def standard_state(n, hbar=1.0):
    return GeometricState(canonical_frame(n), np.eye(n), None, hbar)


def state_signature(state):
    """Gauge-invariant description of a pure state as a dict of arrays.

    Projectors onto both planes, ``E A^{-1} E^T`` (which encodes ``X_l``
    independently of the basis) and the center.
    """
    E = state.frame.ell.basis
    return {
        "ell_projector": state.frame.ell.projector,
        "ell_prime_projector": state.frame.ell_prime.projector,
        "x_body": E @ np.linalg.inv(state.shape_x) @ E.T,
        "center": np.array(state.center),
    }


def john_of_state(state):
    """John ellipsoid of a state.

    Pure states give ``S(B(sqrt(hbar))) + center`` with S the canonical form,
    i.e. shape ``(S S^T)^{-1} = -J S S^T J``, a quantum blob. Mixed states
    give the John ellipsoid of the transported product mapped back, which is
    admissible whenever the containment condition holds.
    """
    n = state.n
    J = standard_J(n)
    if isinstance(state, MixedGeometricState):
        Sp = frame_transport(state.frame)
        Ki = np.linalg.inv(state.frame.pairing)
        P_canon = Ki.T @ state.shape_p @ Ki
        j = john_of_product(
            Ellipsoid(state.shape_x, None, state.hbar), Ellipsoid(P_canon, None, state.hbar)
        )
        Si = symplectic_inverse(Sp)
        Q = Si.T @ j.Q @ Si
        return Ellipsoid(0.5 * (Q + Q.T), state.center, state.hbar)
    S = canonical_form(state)
    Q = -J @ S @ S.T @ J
    return Ellipsoid(0.5 * (Q + Q.T), state.center, state.hbar)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Generalized Gaussian ``psi_{A,B}`` displaced to ``center``, modulo a global phase.

    ``psi_{A,B}(x) = (pi hbar)^{-n/4} (det A)^{1/4} exp(-(A + iB) x.x / 2 hbar)``.
    """

    A: np.ndarray
    B: np.ndarray
    center: np.ndarray = None
    hbar: float = 1.0

    def __post_init__(self):
        A = check_pd(self.A, name="A")
        B = check_symmetric(self.B, name="B")
        n = A.shape[0]
        if B.shape != (n, n):
            raise DimensionError("A and B must have the same size")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "center", _center(self.center, n))
        object.__setattr__(self, "hbar", _hbar(self.hbar))

    @property
    def n(self):
        return self.A.shape[0]


def wigner_matrix(g):
    """``G = [[A + B A^{-1} B, B A^{-1}], [A^{-1} B, A^{-1}]]``.

    The Wigner function of ``g`` is ``(pi hbar)^{-n} exp(-G (z - z0).(z - z0) / hbar)``.
    """
    Ai = np.linalg.inv(g.A)
    B = g.B
    G = np.block([[g.A + B @ Ai @ B, B @ Ai], [Ai @ B, Ai]])
    return 0.5 * (G + G.T)


def gaussian_from_wigner(G, tol=SP_TOL):
    """Recover ``(A, B)`` from a Wigner matrix: ``A = G_pp^{-1}``, ``B = G_xp G_pp^{-1}``."""
    try:
        G = check_pd(G, name="G")
        n = half_dim(G)
    except (DimensionError, ValueError) as exc:
        raise InvalidWignerError(str(exc)) from None
    res = symplectic_residual(G)
    if res > tol * max(1.0, np.max(np.abs(G)) ** 2):
        raise InvalidWignerError(f"G is not symplectic (residual {res:.2e})")
    Gxp, Gpp = G[:n, n:], G[n:, n:]
    A = np.linalg.inv(Gpp)
    B = Gxp @ A
    scale = max(1.0, np.max(np.abs(B)))
    if np.max(np.abs(B - B.T)) > 1e-8 * scale:
        raise InvalidWignerError("recovered B is not symmetric")
    return 0.5 * (A + A.T), 0.5 * (B + B.T)


def wigner_function(g, z):
    """Evaluate the Wigner function of ``g`` at one point or at rows of ``z``."""
    G = wigner_matrix(g)
    u = np.atleast_2d(np.asarray(z, dtype=float)) - g.center
    q = np.einsum("ki,ij,kj->k", u, G, u)
    w = (np.pi * g.hbar) ** (-g.n) * np.exp(-q / g.hbar)
    return w if np.ndim(z) > 1 else float(w[0])


def gaussian_symplectic_factor(A, B):
    """``S_AB = [[A^{-1/2}, 0], [-B A^{-1/2}, A^{1/2}]]``, with ``(S_AB S_AB^T)^{-1} = G``."""
    Ah, Aih = sym_sqrt(check_pd(A, name="A"))
    B = check_symmetric(B, name="B")
    n = Ah.shape[0]
    return np.block([[Aih, np.zeros((n, n))], [-B @ Aih, Ah]])


def to_gaussian(state):
    """Gaussian whose Wigner matrix is ``(S S^T)^{-1}`` for the canonical form S."""
    S = canonical_form(state)
    J = standard_J(state.n)
    G = -J @ S @ S.T @ J
    A, B = gaussian_from_wigner(0.5 * (G + G.T), tol=1e-7)
    return GaussianState(A, B, state.center, state.hbar)


def from_gaussian(g):
    """Geometric state ``S_AB(B_X(sqrt(hbar)) x B_P(sqrt(hbar))) + center``."""
    return from_canonical(gaussian_symplectic_factor(g.A, g.B), g.center, g.hbar)


def metaplectic_act(S, g):
    """Action of the metaplectic lift of S: ``G -> S^{-T} G S^{-1}``, ``z0 -> S z0``."""
    S = np.asarray(S, dtype=float)
    Si = symplectic_inverse(S)
    G = Si.T @ wigner_matrix(g) @ Si
    A, B = gaussian_from_wigner(0.5 * (G + G.T), tol=1e-7)
    return GaussianState(A, B, S @ g.center, g.hbar)


def displace(z0, g):
    """Heisenberg-Weyl displacement: adds ``z0`` to the center."""
    return GaussianState(g.A, g.B, g.center + np.asarray(z0, dtype=float), g.hbar)


@dataclass(frozen=True)
class Marginals:
    """Means and covariances of the position and momentum densities."""

    mean_x: np.ndarray
    cov_x: np.ndarray
    mean_p: np.ndarray
    cov_p: np.ndarray


def marginals_gaussian(g):
    """Marginals of the Wigner function, read off the covariance ``(hbar/2) G^{-1}``.

    The position block equals ``(hbar/2) A^{-1}``, the covariance of ``|psi_{A,B}|^2``.
    """
    n = g.n
    J = standard_J(n)
    Sigma = -0.5 * g.hbar * J @ wigner_matrix(g) @ J
    return Marginals(
        mean_x=g.center[:n].copy(),
        cov_x=Sigma[:n, :n],
        mean_p=g.center[n:].copy(),
        cov_p=Sigma[n:, n:],
    )


def gaussian_covariance(g):
    """Covariance matrix ``(hbar/2) G^{-1}`` of the Gaussian state."""
    J = standard_J(g.n)
    return -0.5 * g.hbar * J @ wigner_matrix(g) @ J
