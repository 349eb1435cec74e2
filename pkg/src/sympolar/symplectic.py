"""Symplectic linear algebra on R^{2n} with coordinates ordered (x_1..x_n, p_1..p_n).

The standard symplectic matrix is ``J = [[0, I], [-I, 0]]`` and a matrix ``S``
is symplectic when ``S.T @ J @ S == J``. The symplectic form is
``sigma(z, w) = (J z) . w = p.x' - x.p'``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import (
    DimensionError,
    IsotropyError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    NotSymplecticError,
    NumericalError,
    RankError,
)

SP_TOL = 1e-9
SYM_TOL = 1e-10
PD_TOL = 1e-12


def half_dim(M):
    """Return n for a 2n x 2n matrix (or a length-2n vector)."""
    M = np.asarray(M)
    d = M.shape[0]
    if M.ndim == 2 and M.shape[1] != d:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if d == 0 or d % 2:
        raise DimensionError(f"phase-space dimension must be even and positive, got {d}")
    return d // 2


def standard_J(n):
    """Return the standard symplectic matrix ``[[0, I], [-I, 0]]`` of size 2n."""
    if int(n) != n or n < 1:
        raise DimensionError(f"n must be a positive integer, got {n}")
    n = int(n)
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def sigma(z, w):
    """Symplectic form ``sigma(z, w) = (J z) . w``."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    J = standard_J(half_dim(z))
    return float(J @ z @ w)


def as_matrix(M, name="matrix"):
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DimensionError(f"{name} has non-finite entries")
    return M


def check_symmetric(M, tol=SYM_TOL, name="matrix"):
    """Validate symmetry relative to the largest entry and return the symmetrized copy."""
    M = as_matrix(M, name)
    scale = max(np.max(np.abs(M)), 1.0e-300)
    if np.max(np.abs(M - M.T)) > tol * scale:
        raise NotSymmetricError(f"{name} is not symmetric")
    return 0.5 * (M + M.T)


def check_pd(M, tol=PD_TOL, name="matrix"):
    """Validate that M is symmetric positive definite; return the symmetrized copy.

    The smallest eigenvalue must exceed ``tol * ||M||_2``.
    """
    M = check_symmetric(M, name=name)
    w = np.linalg.eigvalsh(M)
    if w[-1] <= 0 or w[0] <= tol * w[-1]:
        raise NotPositiveDefiniteError(
            f"{name} is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return M


def sym_sqrt(M):
    """Symmetric square root and inverse square root of a symmetric PD matrix."""
    w, V = np.linalg.eigh(M)
    r = np.sqrt(w)
    return (V * r) @ V.T, (V / r) @ V.T


def symplectic_residual(S):
    """Return ``max |S^T J S - J|``."""
    S = as_matrix(S)
    J = standard_J(half_dim(S))
    return float(np.max(np.abs(S.T @ J @ S - J)))


def is_symplectic(S, tol=SP_TOL):
    """True iff ``max |S^T J S - J| <= tol``."""
    return symplectic_residual(S) <= tol


def symplectic_eigenvalues(M):
    """Symplectic spectrum of a symmetric positive definite 2n x 2n matrix.

    The skew-symmetric matrix ``K = M^{1/2} J M^{1/2}`` has eigenvalues
    ``±i lambda_j``; ``iK`` is Hermitian with real eigenvalues ``±lambda_j``.

    Returns
    -------
    ndarray
        The n values ``lambda_j``, sorted non-increasing.
    """
    M = check_pd(M)
    n = half_dim(M)
    R, _ = sym_sqrt(M)
    K = R @ standard_J(n) @ R
    w = np.linalg.eigvalsh(1j * K)
    return w[::-1][:n].copy()


@dataclass(frozen=True)
class WilliamsonForm:
    """``M = S.T @ diag(spectrum, spectrum) @ S`` with S symplectic."""

    S: np.ndarray
    spectrum: np.ndarray

    @property
    def D(self):
        return np.diag(np.concatenate([self.spectrum, self.spectrum]))


def williamson(M, sp_tol=1e-6, rel_tol=1e-6):
    """Williamson normal form of a symmetric positive definite matrix.

    With ``R = M^{1/2}`` the matrix ``K = R J R`` is skew-symmetric. An
    orthogonal ``W`` with ``W^T K W = J diag(L, L)`` is built from the
    eigenvectors of the Hermitian matrix ``iK``: for the eigenvector
    ``u = x + iy`` of ``+lambda``, ``K x = lambda y`` and ``K y = -lambda x``,
    so the columns ``sqrt(2) y`` (position slot) and ``sqrt(2) x`` (momentum
    slot) give one canonical 2x2 block with its positive entry upper right.
    Then ``S = D^{-1/2} W^T R`` satisfies ``S^T D S = M`` and ``S J S^T = J``.

    Blocks are sorted by non-increasing symplectic eigenvalue. For repeated
    eigenvalues the blocks of S are only defined up to a unitary mixing.

    Parameters
    ----------
    M : array_like
        Symmetric positive definite 2n x 2n matrix.
    sp_tol, rel_tol : float
        Sanity thresholds; a :class:`NumericalError` is raised when the
        symplecticity residual or the relative reconstruction residual exceeds
        them (they are loose guards against eigensolver breakdown, not the
        accuracy contract).
    """
    M = check_pd(M)
    n = half_dim(M)
    R, _ = sym_sqrt(M)
    K = R @ standard_J(n) @ R
    w, U = np.linalg.eigh(1j * K)
    idx = np.argsort(w)[::-1][:n]
    lam = w[idx]
    U = U[:, idx]
    # Each eigenvector is defined up to a phase (a rotation inside its block).
    # Gauge: the largest component of u is made purely imaginary and positive,
    # so the position column has a positive dominant entry.
    k = np.argmax(np.abs(U) > (1 - 1e-12) * np.max(np.abs(U), axis=0), axis=0)
    lead = U[k, np.arange(n)]
    U = U * (1j * np.conj(lead) / np.abs(lead))
    W = np.empty((2 * n, 2 * n))
    W[:, :n] = np.sqrt(2.0) * U.imag
    W[:, n:] = np.sqrt(2.0) * U.real
    d = np.concatenate([lam, lam])
    S = (W.T @ R) / np.sqrt(d)[:, None]
    sp_res = symplectic_residual(S)
    rec = float(np.max(np.abs(S.T @ (d[:, None] * S) - M)) / np.max(np.abs(M)))
    if not (np.isfinite(sp_res) and sp_res <= sp_tol and rec <= rel_tol):
        raise NumericalError(
            f"Williamson reduction failed (symplectic residual {sp_res:.2e}, "
            f"reconstruction residual {rec:.2e})",
            residual={"symplectic": sp_res, "reconstruction": rec},
        )
    return WilliamsonForm(S=S, spectrum=lam.copy())


def complete_symplectic_basis(e, tol=SP_TOL):
    """Complete a basis of a Lagrangian plane to a symplectic basis.

    Parameters
    ----------
    e : array_like, shape (2n, n)
        Columns spanning a Lagrangian plane.

    Returns
    -------
    ndarray
        ``S = [e, f]`` with ``S^T J S = J``; the first n columns are the input
        vectors and ``f = J^T e (e^T e)^{-1}``, so ``e_i^T J f_j = delta_ij``.
    """
    E = np.array(e, dtype=float)
    if E.ndim != 2 or E.shape[0] != 2 * E.shape[1]:
        raise DimensionError(f"expected a 2n x n matrix, got shape {E.shape}")
    n = E.shape[1]
    J = standard_J(n)
    sv = np.linalg.svd(E, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1e-300):
        raise RankError("vectors are linearly dependent")
    scale = sv[0] ** 2
    if np.max(np.abs(E.T @ J @ E)) > tol * scale:
        raise IsotropyError("vectors do not span an isotropic subspace")
    F = J.T @ E @ np.linalg.inv(E.T @ E)
    return np.hstack([E, F])


def generator_ML(L):
    """Return ``M_L = [[L^{-1}, 0], [0, L^T]]``."""
    L = as_matrix(L, "L")
    n = L.shape[0]
    try:
        Linv = np.linalg.inv(L)
    except np.linalg.LinAlgError:
        raise DimensionError("L is singular") from None
    if not np.all(np.isfinite(Linv)) or np.linalg.cond(L) > 1e14:
        raise DimensionError("L is singular")
    Z = np.zeros((n, n))
    return np.block([[Linv, Z], [Z, L.T]])


def generator_VP(P):
    """Return the shear ``V_{-P} = [[I, 0], [P, I]]`` for symmetric P."""
    P = check_symmetric(P, name="P")
    n = P.shape[0]
    I = np.eye(n)
    return np.block([[I, np.zeros((n, n))], [P, I]])


def pre_iwasawa(S):
    """Factor a symplectic matrix as ``S = M_L V_{-P} U``.

    L is symmetric positive definite, P symmetric, U symplectic and orthogonal.
    With blocks ``S = [[a, b], [c, d]]``, ``L = (a a^T + b b^T)^{-1/2}`` and
    ``P = L (a c^T + b d^T) L^{-1}``; U is whatever remains.
    """
    S = as_matrix(S, "S")
    n = half_dim(S)
    a, b = S[:n, :n], S[:n, n:]
    c, d = S[n:, :n], S[n:, n:]
    Y = a @ a.T + b @ b.T
    Yh, Yih = sym_sqrt(0.5 * (Y + Y.T))
    L = Yih
    P = L @ (a @ c.T + b @ d.T) @ Yh
    P = 0.5 * (P + P.T)
    I = np.eye(n)
    Z = np.zeros((n, n))
    # (M_L V_{-P})^{-1} = V_{P} M_{L^{-1}}
    inv_left = np.block([[I, Z], [-P, I]]) @ np.block([[L, Z], [Z, Yh]])
    U = inv_left @ S
    return L, P, U


def unitary_to_symplectic(u):
    """Embed a complex unitary ``X + iY`` as the orthogonal symplectic ``[[X, -Y], [Y, X]]``."""
    u = np.asarray(u, dtype=complex)
    X, Y = u.real, u.imag
    return np.block([[X, -Y], [Y, X]])


def random_symplectic(n, rng, scale=1.0):
    """Random symplectic matrix ``M_L V_{-P} U``.

    ``L = expm(scale * A)`` with A symmetric Gaussian, P symmetric Gaussian
    times ``scale``, U from a Haar-random unitary. ``scale`` controls the
    conditioning.
    """
    G = rng.standard_normal((n, n))
    L = linalg.expm(scale * 0.5 * (G + G.T) / np.sqrt(2 * n))
    G = rng.standard_normal((n, n))
    P = scale * 0.5 * (G + G.T) / np.sqrt(2 * n)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(Z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return generator_ML(L) @ generator_VP(P) @ unitary_to_symplectic(q)


def require_symplectic(S, tol=SP_TOL, name="S"):
    S = as_matrix(S, name)
    half_dim(S)
    res = symplectic_residual(S)
    if res > tol:
        raise NotSymplecticError(f"{name} is not symplectic (residual {res:.2e})")
    return S
