"""Quantum admissibility of phase-space ellipsoids and covariance matrices.

An ellipsoid ``{M z.z <= hbar}`` is admissible when it contains a quantum
blob ``S(B(sqrt(hbar)))``; equivalently its largest symplectic eigenvalue is
at most 1, equivalently it contains its own symplectic polar dual. A
covariance matrix Sigma is admissible when ``Sigma + (i hbar / 2) J`` is
positive semidefinite, which matches the ellipsoid criterion through
``Sigma = (hbar / 2) M^{-1}``.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh

from .ellipsoid import (
    Ellipsoid,
    Subspace,
    contains,
    symplectic_polar_dual,
)
from .errors import UnsupportedError
from .symplectic import (
    SP_TOL,
    check_pd,
    check_symmetric,
    half_dim,
    is_symplectic,
    random_symplectic,
    standard_J,
    sym_sqrt,
    symplectic_eigenvalues,
    williamson,
)

ADM_TOL = 1e-9
DEFAULT_PLANES = 64


def _centered(E):
    if not E.is_centered:
        raise UnsupportedError("admissibility tests expect a centered ellipsoid")
    half_dim(E.Q)


def covariance_from_shape(M, hbar=1.0):
    """Covariance ``(hbar/2) M^{-1}`` induced by the ellipsoid ``{M z.z <= hbar}``."""
    return 0.5 * hbar * np.linalg.inv(check_pd(M, name="M"))


def shape_from_covariance(Sigma, hbar=1.0):
    """Shape ``(hbar/2) Sigma^{-1}`` of the covariance ellipsoid at level hbar."""
    return 0.5 * hbar * np.linalg.inv(check_pd(Sigma, name="Sigma"))


def is_quantum_blob(E, tol=SP_TOL):
    """True iff the shape matrix is symplectic (E is then its own symplectic dual)."""
    half_dim(E.Q)
    return is_symplectic(E.Q, tol)


def admissible_by_spectrum(E, tol=ADM_TOL):
    """Return ``(verdict, margin)`` with ``margin = 1 - lambda_max``."""
    _centered(E)
    lam = symplectic_eigenvalues(E.Q)
    margin = 1.0 - float(lam[0])
    return margin >= -tol, margin


def inclusion_margin(E):
    """Smallest generalized eigenvalue of (dual shape, shape) minus one.

    Non-negative exactly when the symplectic dual lies inside E.
    """
    dual = symplectic_polar_dual(E)
    mu = eigh(dual.Q, E.Q, eigvals_only=True)
    return float(mu[0]) - 1.0


def admissible_by_inclusion(E, tol=ADM_TOL):
    """True iff the symplectic polar dual of E is contained in E."""
    _centered(E)
    return contains(E, symplectic_polar_dual(E), tol)


def symplectic_plane_bases(n, count, seed):
    """Orthonormal bases, shape ``(count + n, 2n, 2)``, of seeded symplectic 2-planes.

    The first ``count`` are images of the (x_1, p_1) plane under random
    ``S = M_L V_{-P} U`` (same distribution as :func:`random_symplectic`),
    generated in one batch; the last n are the coordinate planes (x_j, p_j).
    """
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(2 * n)
    G = rng.standard_normal((count, n, n))
    w, V = np.linalg.eigh(0.5 * (G + np.swapaxes(G, 1, 2)) * scale)
    G = rng.standard_normal((count, n, n))
    P = 0.5 * (G + np.swapaxes(G, 1, 2)) * scale
    c = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    # U maps e_1 to (Re c, Im c) and e_{n+1} to (-Im c, Re c)
    x = np.stack([c.real, -c.imag], axis=-1)
    p = np.stack([c.imag, c.real], axis=-1)
    p = p + P @ x
    Linv = (V * np.exp(-w)[:, None, :]) @ np.swapaxes(V, 1, 2)
    L = (V * np.exp(w)[:, None, :]) @ np.swapaxes(V, 1, 2)
    B = np.concatenate([Linv @ x, L @ p], axis=1)
    coords = np.zeros((n, 2 * n, 2))
    coords[np.arange(n), np.arange(n), 0] = 1.0
    coords[np.arange(n), n + np.arange(n), 1] = 1.0
    B = np.concatenate([B, coords])
    Qf, R = np.linalg.qr(B)
    return Qf * np.sign(np.diagonal(R, axis1=1, axis2=2))[:, None, :]


def sample_symplectic_planes(n, count, seed):
    """The planes of :func:`symplectic_plane_bases` as :class:`Subspace` objects."""
    return [Subspace(B) for B in symplectic_plane_bases(n, count, seed)]


def section_actions(E, planes):
    """Absolute symplectic areas of the sections of E by the given planes.

    ``planes`` is a list of 2-dimensional subspaces or an array of
    orthonormal bases of shape ``(k, 2n, 2)``.
    """
    if not isinstance(planes, np.ndarray):
        planes = np.stack([F.basis for F in planes])
    n = half_dim(E.Q)
    sec = np.swapaxes(planes, 1, 2) @ E.Q @ planes
    area = np.pi * E.hbar / np.sqrt(np.linalg.det(sec))
    omega = np.einsum("ki,ij,kj->k", planes[:, :, 0], standard_J(n), planes[:, :, 1])
    return np.abs(omega) * area


def admissible_by_tomography(E, planes=DEFAULT_PLANES, seed=0, tol=ADM_TOL):
    """Sampled area test on the symplectic dual.

    The symplectic area of every section of the dual by a symplectic plane is
    at most ``pi hbar`` when E is admissible. Only finitely many planes are
    tested, so ``False`` is conclusive while ``True`` is not. The symplectic
    (not Euclidean) area is used: on a tilted symplectic plane the Euclidean
    section area of a quantum blob can exceed ``pi hbar``.
    """
    _, margin = tomography_margin(E, planes, seed)
    return margin >= -tol * np.pi * E.hbar


def tomography_margin(E, planes=DEFAULT_PLANES, seed=0):
    """Return ``(max section action of the dual, pi hbar - that max)``."""
    _centered(E)
    n = half_dim(E.Q)
    dual = symplectic_polar_dual(E)
    acts = section_actions(dual, symplectic_plane_bases(n, planes, seed))
    top = float(np.max(acts))
    return top, np.pi * E.hbar - top


def _complex_embedding(Sigma, hbar):
    n = half_dim(Sigma)
    Y = 0.5 * hbar * standard_J(n)
    return np.block([[Sigma, -Y], [Y, Sigma]])


def positivity_check(Sigma, hbar=1.0, tol=ADM_TOL):
    """Test ``Sigma + (i hbar/2) J >= 0``.

    The Hermitian matrix ``X + iY`` is represented by the real symmetric
    ``[[X, -Y], [Y, X]]`` whose spectrum is that of ``X + iY`` doubled.

    Returns
    -------
    (bool, float)
        Verdict ``min_eig >= -tol`` and the smallest eigenvalue.
    """
    Sigma = check_symmetric(Sigma, name="Sigma")
    w = np.linalg.eigvalsh(_complex_embedding(Sigma, hbar))
    m = float(w[0])
    return m >= -tol, m


class RSEntry(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def rs_check(Sigma, hbar=1.0, tol=ADM_TOL):
    """Robertson-Schroedinger inequality ``s_xx s_pp >= s_xp^2 + hbar^2/4`` per degree of freedom."""
    Sigma = check_symmetric(Sigma, name="Sigma")
    n = half_dim(Sigma)
    out = []
    for j in range(n):
        lhs = float(Sigma[j, j] * Sigma[n + j, n + j])
        rhs = float(Sigma[j, n + j] ** 2 + 0.25 * hbar**2)
        out.append(RSEntry(lhs, rhs, lhs >= rhs - tol * max(1.0, rhs)))
    return out


def covariance_ellipsoid(Sigma, hbar=1.0):
    """``{1/2 Sigma^{-1} z.z <= 1}``, stored as shape ``(hbar/2) Sigma^{-1}``."""
    return Ellipsoid(shape_from_covariance(Sigma, hbar), None, hbar)


def info_ellipsoid(Sigma, hbar=1.0):
    """``{1/2 Sigma z.z <= 1}``, stored as shape ``(hbar/2) Sigma``."""
    Sigma = check_pd(Sigma, name="Sigma")
    return Ellipsoid(0.5 * hbar * Sigma, None, hbar)


def legendre_dual(E):
    """Swap ``Q -> (hbar/2)^2 Q^{-1}``; maps the covariance ellipsoid to the information ellipsoid.

    Note the ordinary polar dual of the covariance ellipsoid is the
    information ellipsoid dilated by ``hbar/2``; the two coincide only when
    ``hbar = 2``.
    """
    if not E.is_centered:
        raise UnsupportedError("Legendre duality expects a centered ellipsoid")
    return Ellipsoid((0.5 * E.hbar) ** 2 * np.linalg.inv(E.Q), None, E.hbar)


def purity(Sigma, hbar=1.0):
    """``(hbar/2)^n det(Sigma)^{-1/2}``; values above 1 flag an unphysical Sigma."""
    Sigma = check_pd(Sigma, name="Sigma")
    n = half_dim(Sigma)
    _, logdet = np.linalg.slogdet(Sigma)
    return float(np.exp(n * np.log(0.5 * hbar) - 0.5 * logdet))


class HardyResult(NamedTuple):
    ok: bool
    eigenvalues: np.ndarray
    saturated: bool


def hardy_check(A, B, tol=ADM_TOL):
    """Eigenvalues of AB (via the similar matrix ``A^{1/2} B A^{1/2}``).

    Passes when all are at most 1; saturated when all equal 1.
    """
    A = check_pd(A, name="A")
    B = check_pd(B, name="B")
    Ah, _ = sym_sqrt(A)
    ev = np.linalg.eigvalsh(Ah @ B @ Ah)[::-1]
    ok = bool(ev[0] <= 1 + tol)
    sat = bool(np.all(np.abs(ev - 1) <= tol))
    return HardyResult(ok, ev, sat)


def subgaussian_check(M, hbar=1.0, tol=ADM_TOL):
    """Sub-Gaussian Wigner bound criterion; identical to the spectral admissibility test."""
    return admissible_by_spectrum(Ellipsoid(M, None, hbar), tol)[0]


@dataclass
class NarcowichReport:
    """Capacity diagnostics of a covariance matrix.

    ``capacity_cov`` is the capacity of the covariance ellipsoid, compared with
    ``pi hbar``. ``capacity_legendre`` is the capacity of the information
    ellipsoid ``{1/2 Sigma z.z <= 1}``; it equals ``4 pi lambda_min / hbar``
    and is compared with ``4 pi / hbar`` in both directions (``<=`` is a
    necessary condition, not a sufficient one). ``section_max`` is the largest
    sampled section action of the information ellipsoid over symplectic
    planes, ``section_sup`` the exact supremum (attained on a Williamson
    plane), both compared with ``4 pi / hbar``. ``null_plane_max`` is the
    largest absolute action over sampled isotropic planes (always 0; None
    for n = 1 where no isotropic 2-plane exists).
    """

    hbar: float
    capacity_cov: float
    cov_ok: bool
    capacity_legendre: float
    threshold: float
    legendre_le_threshold: bool
    legendre_ge_threshold: bool
    section_max: float
    section_sup: float
    section_ok: bool
    null_plane_max: float = None
    planes: int = DEFAULT_PLANES
    seed: int = 0

    def as_dict(self):
        return dict(self.__dict__)


def narcowich_report(Sigma, hbar=1.0, planes=DEFAULT_PLANES, seed=0, tol=ADM_TOL):
    Sigma = check_pd(Sigma, name="Sigma")
    n = half_dim(Sigma)
    M = shape_from_covariance(Sigma, hbar)
    lam = symplectic_eigenvalues(M)
    cap_cov = np.pi * hbar / lam[0]
    threshold = 4 * np.pi / hbar
    cap_leg = 4 * np.pi * lam[-1] / hbar

    info = info_ellipsoid(Sigma, hbar)
    sampled = section_actions(info, symplectic_plane_bases(n, planes, seed))
    wf = williamson(info.Q)
    Sinv = -standard_J(n) @ wf.S.T @ standard_J(n)
    w_planes = [Subspace(Sinv[:, [j, n + j]]) for j in range(n)]
    sup = float(np.max(section_actions(info, w_planes)))
    smax = max(float(np.max(sampled)), sup)

    null_max = None
    if n >= 2:
        rng = np.random.default_rng(seed)
        null = [Subspace(random_symplectic(n, rng)[:, [0, 1]]) for _ in range(max(planes // 4, 1))]
        null_max = float(np.max(section_actions(info, null)))

    rel = tol * threshold
    return NarcowichReport(
        hbar=float(hbar),
        capacity_cov=float(cap_cov),
        cov_ok=bool(cap_cov >= np.pi * hbar * (1 - tol)),
        capacity_legendre=float(cap_leg),
        threshold=float(threshold),
        legendre_le_threshold=bool(cap_leg <= threshold + rel),
        legendre_ge_threshold=bool(cap_leg >= threshold - rel),
        section_max=float(np.max(sampled)),
        section_sup=sup,
        section_ok=bool(smax <= threshold + rel),
        null_plane_max=null_max,
        planes=int(planes),
        seed=int(seed),
    )


@dataclass
class AdmissibilityReport:
    """Verdicts of every admissibility criterion for one ellipsoid / covariance pair.

    ``consistent`` compares the three exact criteria (spectrum, inclusion,
    positivity). The tomography sampler and the Robertson-Schroedinger test
    are necessary conditions only and may pass on inadmissible input.
    """

    hbar: float
    spectrum: np.ndarray
    by_spectrum: bool
    by_inclusion: bool
    by_tomography: bool
    by_positivity: bool
    by_rs: bool
    margins: dict = field(default_factory=dict)

    @property
    def consistent(self):
        return self.by_spectrum == self.by_inclusion == self.by_positivity


def admissibility_report(E=None, Sigma=None, hbar=None, planes=DEFAULT_PLANES, seed=0, tol=ADM_TOL):
    """Run all criteria. Pass either an ellipsoid ``E`` or a covariance ``Sigma``."""
    if (E is None) == (Sigma is None):
        raise ValueError("pass exactly one of E or Sigma")
    if E is None:
        h = 1.0 if hbar is None else float(hbar)
        E = covariance_ellipsoid(Sigma, h)
    _centered(E)
    h = E.hbar
    Sigma = covariance_from_shape(E.Q, h)
    spec = symplectic_eigenvalues(E.Q)
    ok_spec, m_spec = admissible_by_spectrum(E, tol)
    m_inc = inclusion_margin(E)
    ok_inc = admissible_by_inclusion(E, tol)
    _, m_tom = tomography_margin(E, planes, seed)
    ok_tom = m_tom >= -tol * np.pi * h
    ok_pos, m_pos = positivity_check(Sigma, h, tol)
    rs = rs_check(Sigma, h, tol)
    m_rs = min(e.lhs - e.rhs for e in rs)
    return AdmissibilityReport(
        hbar=h,
        spectrum=spec,
        by_spectrum=bool(ok_spec),
        by_inclusion=bool(ok_inc),
        by_tomography=bool(ok_tom),
        by_positivity=bool(ok_pos),
        by_rs=all(e.ok for e in rs),
        margins={
            "spectrum": m_spec,
            "inclusion": m_inc,
            "tomography": float(m_tom),
            "positivity": m_pos,
            "rs": float(m_rs),
        },
    )
