"""Hamiltonian flows, the variational equation and first-order Gaussian beams.

Hamilton's equations ``dz/dt = J grad H(z, t)`` and the variational equation
``dS/dt = J D^2H(z_t, t) S`` (``S_0 = I``) are integrated together with a
fixed-step classical RK4 scheme. A state attached at ``z0`` is propagated by
``z -> z_t + S_t (z - z0)``; Gaussians follow the metaplectic action of
``S_t`` and are displaced to ``z_t``. The symmetrized phase
``gamma = int (sigma(z, dz/dt)/2 - H) ds`` is carried alongside.

Hamiltonians evaluate on batches: ``z`` may have any leading shape
``(..., 2n)``; gradients keep that shape and Hessians have shape
``(..., 2n, 2n)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import BlowUpError, DimensionError, DomainError
from .lagrangian import (
    GaussianState,
    GeometricState,
    MixedGeometricState,
    act_affine,
    metaplectic_act,
)
from .symplectic import check_symmetric, standard_J

DRIFT_TOL = 1e-6


class Hamiltonian:
    """Base class. Subclasses define ``n``, ``value``, ``gradient`` and ``hessian``.

    ``breakpoints`` lists times where H jumps; the integrator never steps
    across them, and uses ``piece(t0, t1)`` on each smooth interval.
    """

    n = None
    breakpoints = ()

    def value(self, z, t=0.0):
        raise NotImplementedError

    def gradient(self, z, t=0.0):
        raise NotImplementedError

    def hessian(self, z, t=0.0):
        raise NotImplementedError

    def piece(self, t0, t1):
        return self


class CallableHamiltonian(Hamiltonian):
    """Wrap user-provided ``value``, ``gradient`` and ``hessian`` callables of ``(z, t)``."""

    def __init__(self, n, value, gradient, hessian):
        self.n = int(n)
        self._v, self._g, self._h = value, gradient, hessian

    def value(self, z, t=0.0):
        return self._v(z, t)

    def gradient(self, z, t=0.0):
        return self._g(z, t)

    def hessian(self, z, t=0.0):
        return self._h(z, t)


class Quadratic(Hamiltonian):
    """``H(z, t) = M(t) z . z / 2`` with M constant, callable, or piecewise constant.

    Parameters
    ----------
    M : array_like or callable
        Symmetric 2n x 2n matrix, or a function of t returning one.
    n : int, optional
        Required when M is callable.
    """

    def __init__(self, M, n=None):
        if callable(M):
            if n is None:
                raise DimensionError("n is required for a time-dependent M")
            self.n = int(n)
            self._M = M
            self._const = None
        else:
            Mc = check_symmetric(M, name="M")
            if Mc.shape[0] % 2:
                raise DimensionError("M must be 2n x 2n")
            self.n = Mc.shape[0] // 2
            self._const = Mc
            self._M = lambda t: Mc
        self._pieces = None

    @classmethod
    def piecewise(cls, breakpoints, matrices):
        """M(t) = ``matrices[i]`` on ``[breakpoints[i-1], breakpoints[i])`` (right-continuous)."""
        mats = [check_symmetric(m, name="M") for m in matrices]
        bps = [float(b) for b in breakpoints]
        if len(mats) != len(bps) + 1:
            raise DimensionError("need one more matrix than breakpoints")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise DomainError("breakpoints must be increasing")
        h = cls(lambda t: mats[int(np.searchsorted(bps, t, side="right"))], n=mats[0].shape[0] // 2)
        h.breakpoints = tuple(bps)
        h._pieces = mats
        return h

    def matrix(self, t=0.0):
        return self._M(t)

    def piece(self, t0, t1):
        if self._pieces is None:
            return self
        return Quadratic(self._M(0.5 * (t0 + t1)))

    def value(self, z, t=0.0):
        z = np.asarray(z, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", z, self._M(t), z)

    def gradient(self, z, t=0.0):
        return np.asarray(z, dtype=float) @ self._M(t)

    def hessian(self, z, t=0.0):
        z = np.asarray(z, dtype=float)
        return np.broadcast_to(self._M(t), z.shape[:-1] + (2 * self.n, 2 * self.n)).copy()


def _smoothstep(u):
    """C-infinity step from 0 (u <= 0) to 1 (u >= 1) with first two derivatives."""
    u = np.asarray(u, dtype=float)

    def f(s):
        s = np.clip(s, 0.0, None)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
            d1 = np.where(s > 0, val / np.where(s > 0, s, 1.0) ** 2, 0.0)
            d2 = np.where(s > 0, val * (1.0 / np.where(s > 0, s, 1.0) ** 4 - 2.0 / np.where(s > 0, s, 1.0) ** 3), 0.0)
        return val, d1, d2

    a, a1, a2 = f(u)
    b, b1, b2 = f(1.0 - u)
    # d/du of f(1-u) is -f'(1-u); second derivative is +f''(1-u)
    b1 = -b1
    D = a + b
    D1 = a1 + b1
    D2 = a2 + b2
    s = a / D
    s1 = (a1 * D - a * D1) / D**2
    s2 = (a2 * D - a * D2) / D**2 - 2 * D1 * (a1 * D - a * D1) / D**3
    return s, s1, s2


class KineticPlusPotential(Hamiltonian):
    """``H = |p|^2/2 + chi(x) V(x, t)``.

    ``V(x, t)``, ``dV(x, t)`` and ``d2V(x, t)`` must accept batches of
    positions with shape ``(..., n)``. With ``cutoff = R`` the potential is
    multiplied by a smooth radial cutoff ``chi`` equal to 1 for ``|x| <= R``
    and 0 for ``|x| >= 2R``, which bounds all derivatives of order >= 2.
    Verifying the growth conditions on V without a cutoff is left to the
    caller.
    """

    def __init__(self, n, V, dV, d2V, cutoff=None):
        self.n = int(n)
        self.V, self.dV, self.d2V = V, dV, d2V
        if cutoff is not None and not cutoff > 0:
            raise DomainError("cutoff radius must be positive")
        self.cutoff = cutoff

    def _chi(self, x):
        R = self.cutoff
        r2 = np.einsum("...i,...i->...", x, x)
        u = (r2 - R**2) / (3 * R**2)
        s, s1, s2 = _smoothstep(u)
        g, g1, g2 = 1.0 - s, -s1 / (3 * R**2), -s2 / (3 * R**2) ** 2
        chi = g
        dchi = 2 * g1[..., None] * x
        d2chi = 2 * g1[..., None, None] * np.eye(self.n) + 4 * g2[..., None, None] * x[..., :, None] * x[..., None, :]
        return chi, dchi, d2chi

    def _split(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != 2 * self.n:
            raise DimensionError(f"expected phase-space points of length {2 * self.n}")
        return z[..., : self.n], z[..., self.n :]

    def _potential(self, x, t):
        v = np.asarray(self.V(x, t), dtype=float)
        dv = np.asarray(self.dV(x, t), dtype=float)
        d2v = np.asarray(self.d2V(x, t), dtype=float)
        if self.cutoff is None:
            return v, dv, d2v
        c, dc, d2c = self._chi(x)
        return (
            c * v,
            c[..., None] * dv + v[..., None] * dc,
            c[..., None, None] * d2v
            + dc[..., :, None] * dv[..., None, :]
            + dv[..., :, None] * dc[..., None, :]
            + v[..., None, None] * d2c,
        )

    def value(self, z, t=0.0):
        x, p = self._split(z)
        v, _, _ = self._potential(x, t)
        return 0.5 * np.einsum("...i,...i->...", p, p) + v

    def gradient(self, z, t=0.0):
        x, p = self._split(z)
        _, dv, _ = self._potential(x, t)
        return np.concatenate([np.broadcast_to(dv, x.shape), p], axis=-1)

    def hessian(self, z, t=0.0):
        x, _ = self._split(z)
        _, _, d2v = self._potential(x, t)
        n = self.n
        H = np.zeros(x.shape[:-1] + (2 * n, 2 * n))
        H[..., :n, :n] = d2v
        H[..., n:, n:] = np.eye(n)
        return H


def polynomial_potential(n, coefficients, cutoff=None):
    """Separable ``V(x) = sum_j sum_k c_k x_j^k`` as a :class:`KineticPlusPotential`."""
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise DomainError("coefficients must be a non-empty list")
    dc = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
    d2c = np.polynomial.polynomial.polyder(dc) if dc.size > 1 else np.zeros(1)
    pv = np.polynomial.polynomial.polyval

    def V(x, t):
        return np.sum(pv(x, c), axis=-1)

    def dV(x, t):
        return pv(x, dc) * np.ones_like(x)

    def d2V(x, t):
        d = pv(x, d2c) * np.ones_like(x)
        return d[..., :, None] * np.eye(n)

    return KineticPlusPotential(n, V, dV, d2V, cutoff)


def harmonic_oscillator(n, omega=1.0):
    """``H = (|p|^2 + omega^2 |x|^2) / 2``."""
    return Quadratic(np.diag(np.concatenate([np.full(n, omega**2), np.ones(n)])))


def free_particle(n):
    return Quadratic(np.diag(np.concatenate([np.zeros(n), np.ones(n)])))


def _segments(H, t_end):
    if not (np.isfinite(t_end) and t_end >= 0):
        raise DomainError("t_end must be finite and non-negative")
    cuts = [b for b in H.breakpoints if 0.0 < b < t_end]
    edges = [0.0] + cuts + [float(t_end)]
    return list(zip(edges[:-1], edges[1:]))


def _rk4(field, y0, t0, t1, dt):
    """Fixed-step RK4 on [t0, t1] with step ``(t1 - t0) / ceil((t1 - t0) / dt)``."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    if t1 <= t0:
        return np.array([t0]), y0[None].copy()
    N = max(1, math.ceil((t1 - t0) / dt - 1e-9))
    h = (t1 - t0) / N
    ts = t0 + h * np.arange(N + 1)
    ts[-1] = t1
    ys = np.empty((N + 1,) + y0.shape)
    ys[0] = y = y0
    # overflow is detected below and reported as a blow-up
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(N):
            t = ts[k]
            k1 = field(t, y)
            k2 = field(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = field(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = field(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise BlowUpError(f"non-finite state after t = {t:.6g}", last_t=float(t))
            ys[k + 1] = y
    return ts, ys


def _check_z0(H, z0):
    z0 = np.asarray(z0, dtype=float).reshape(-1)
    if z0.shape != (2 * H.n,):
        raise DimensionError(f"z0 must have length {2 * H.n}")
    return z0


@dataclass
class Trajectory:
    times: np.ndarray
    points: np.ndarray


@dataclass
class VariationalTrajectory:
    """Reference trajectory with Jacobians ``S_t`` and symmetrized phase at every step."""

    times: np.ndarray
    points: np.ndarray
    jacobians: np.ndarray
    phases: np.ndarray

    @property
    def drift(self):
        """``max |S_t^T J S_t - J|`` at each step."""
        n = self.points.shape[1] // 2
        J = standard_J(n)
        S = self.jacobians
        return np.max(np.abs(np.swapaxes(S, 1, 2) @ J @ S - J), axis=(1, 2))

    @property
    def max_drift(self):
        return float(np.max(self.drift))


def _concat(parts):
    out = [parts[0]]
    for p in parts[1:]:
        out.append(p[1:])
    return np.concatenate(out)


def flow(H, z0, t_end, dt):
    """RK4 trajectory of ``dz/dt = J grad H(z, t)`` sampled at every step."""
    z0 = _check_z0(H, z0)
    J = standard_J(H.n)
    ts_all, zs_all = [], []
    z = z0
    for a, b in _segments(H, t_end):
        Hp = H.piece(a, b)
        ts, zs = _rk4(lambda t, y: Hp.gradient(y, t) @ J.T, z, a, b, dt)
        ts_all.append(ts)
        zs_all.append(zs)
        z = zs[-1]
    return Trajectory(_concat(ts_all), _concat(zs_all))


def _phase_integrand(Hp, ts, zs, J):
    zdot = np.stack([Hp.gradient(z, t) @ J.T for t, z in zip(ts, zs)])
    sig = np.einsum("ij,kj,ki->k", J, zs, zdot)  # sigma(z, zdot) = (J z) . zdot
    energy = np.array([Hp.value(z, t) for t, z in zip(ts, zs)])
    return 0.5 * sig - energy


def _cumulative(ts, f):
    if ts.size < 2:
        return np.zeros(ts.size)
    if ts.size == 2:
        return np.array([0.0, 0.5 * (ts[1] - ts[0]) * (f[0] + f[1])])
    return cumulative_simpson(f, x=ts, initial=0.0)


def variational_flow(H, z0, t_end, dt, reproject=False):
    """Co-integrate the trajectory and ``dS/dt = J D^2H(z_t, t) S`` with ``S_0 = I``.

    With ``reproject=True`` each step applies the first-order correction
    ``S <- S (I + J E / 2)``, ``E = S^T J S - J``, which removes the
    symplectic defect to second order; it is off by default so that drift
    stays observable.
    """
    z0 = _check_z0(H, z0)
    n = H.n
    d = 2 * n
    J = standard_J(n)

    ts_all, zs_all, Ss_all, ph_all = [], [], [], []
    y = np.concatenate([z0, np.eye(d).ravel()])
    gamma0 = 0.0
    for a, b in _segments(H, t_end):
        Hp = H.piece(a, b)

        def field(t, y, Hp=Hp):
            z = y[:d]
            S = y[d:].reshape(d, d)
            return np.concatenate([J @ Hp.gradient(z, t), (J @ Hp.hessian(z, t) @ S).ravel()])

        if reproject:
            ts, ys = _rk4_reprojected(field, y, a, b, dt, d, J)
        else:
            ts, ys = _rk4(field, y, a, b, dt)
        zs = ys[:, :d]
        ph = gamma0 + _cumulative(ts, _phase_integrand(Hp, ts, zs, J))
        ts_all.append(ts)
        zs_all.append(zs)
        Ss_all.append(ys[:, d:].reshape(-1, d, d))
        ph_all.append(ph)
        y = ys[-1]
        gamma0 = ph[-1]
    return VariationalTrajectory(_concat(ts_all), _concat(zs_all), _concat(Ss_all), _concat(ph_all))


def _rk4_reprojected(field, y0, t0, t1, dt, d, J):
    if t1 <= t0:
        return np.array([t0]), y0[None].copy()
    N = max(1, math.ceil((t1 - t0) / dt - 1e-9))
    h = (t1 - t0) / N
    ts = [t0]
    ys = [y0]
    y = y0
    for k in range(N):
        t = t0 + k * h
        _, step = _rk4(field, y, t, t + h, h)
        y = step[-1].copy()
        S = y[d:].reshape(d, d)
        E = S.T @ J @ S - J
        y[d:] = (S @ (np.eye(d) + 0.5 * J @ E)).ravel()
        ts.append(t0 + (k + 1) * h if k + 1 < N else t1)
        ys.append(y)
    return np.array(ts), np.array(ys)


def phase(H, z0, t_end, dt):
    """Symmetrized phase ``int_0^t (sigma(z_s, dz_s/ds)/2 - H(z_s, s)) ds`` (Simpson on the RK4 grid)."""
    return float(variational_flow(H, z0, t_end, dt).phases[-1])


@dataclass
class BeamState:
    """Beam snapshot: reference point, linearized flow, phase and propagated payload."""

    t: float
    z: np.ndarray
    S: np.ndarray
    gamma: float
    payload: object
    drift: float


def _apply(S, z_t, state):
    if isinstance(state, GaussianState):
        centered = GaussianState(state.A, state.B, None, state.hbar)
        g = metaplectic_act(S, centered)
        return GaussianState(g.A, g.B, z_t, state.hbar)
    if isinstance(state, (GeometricState, MixedGeometricState)):
        return act_affine(S, z_t - S @ state.center, state)
    raise DomainError(f"unsupported payload type {type(state).__name__}")


def beam_snapshots(H, state, t_end, dt, count=1):
    """Propagate ``state`` from its center; return ``count + 1`` equally spaced snapshots.

    Snapshot times are taken on the integration grid.
    """
    traj = variational_flow(H, state.center, t_end, dt)
    drift = traj.drift
    m = traj.times.size - 1
    idx = sorted({int(round(k * m / max(count, 1))) for k in range(count + 1)})
    out = []
    for i in idx:
        out.append(
            BeamState(
                t=float(traj.times[i]),
                z=traj.points[i].copy(),
                S=traj.jacobians[i].copy(),
                gamma=float(traj.phases[i]),
                payload=_apply(traj.jacobians[i], traj.points[i], state),
                drift=float(np.max(drift[: i + 1])),
            )
        )
    return out


def beam_propagate(H, state, t_end, dt):
    """Apply ``T(z_t) S_t`` to a geometric or Gaussian state centered at ``z0 = state.center``."""
    return beam_snapshots(H, state, t_end, dt, count=1)[-1]


@dataclass
class BlobTransportReport:
    """Diagnostics of blob transport along a reference trajectory.

    Linearized flow: ``identity_residual`` is ``max |(z(t) - z_t) - S_t (z(0) - z0)|``
    and ``radius_residual`` the largest change of normalized blob radius
    (0 means every sample keeps its radius); ``linear_inside`` says all
    samples stay inside the transported blob within ``tol``.

    Nonlinear flow: ``nonlinear_inside_fraction`` and ``nonlinear_max_excess``
    (largest normalized radius minus one, clipped at 0) describe how the true
    flow leaves the transported blob. ``gronwall_k`` is the largest Hessian
    spectral norm met on the sampled segments and ``gronwall_max_ratio`` the
    largest ``|z(t) - z_t| / (exp(k t) |z(0) - z0|)`` over samples and times.
    """

    sample_count: int
    t_end: float
    identity_residual: float
    radius_residual: float
    linear_inside: bool
    nonlinear_inside_fraction: float
    nonlinear_max_excess: float
    gronwall_k: float
    gronwall_max_ratio: float
    gronwall_ok: bool


def _sample_ball(rng, count, dim, radius, boundary_fraction=0.1):
    u = rng.standard_normal((count, dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = rng.uniform(size=count) ** (1.0 / dim)
    r[: int(boundary_fraction * count)] = 1.0
    return u * (radius * r)[:, None]


def blob_transport_check(H, z0, S, sample_count=1000, t_end=1.0, dt=1e-3, seed=0, hbar=1.0, tol=1e-7):
    """Propagate samples of ``z0 + S(B(sqrt(hbar)))`` under the linearized and the true flow.

    Under the second-order Taylor expansion of H about the reference
    trajectory the samples obey ``z(t) - z_t = S_t (z(0) - z0)`` exactly, so
    they stay in ``z_t + S_t S(B(sqrt(hbar)))``. Reference trajectory,
    Jacobian, linearized and true samples share one RK4 integration.
    """
    z0 = _check_z0(H, z0)
    n = H.n
    d = 2 * n
    J = standard_J(n)
    S = np.asarray(S, dtype=float)
    rng = np.random.default_rng(seed)
    U = _sample_ball(rng, sample_count, d, np.sqrt(hbar))
    X0 = z0 + U @ S.T
    m = sample_count

    def unpack(y):
        z = y[:d]
        St = y[d : d + d * d].reshape(d, d)
        Zl = y[d + d * d : d + d * d + m * d].reshape(m, d)
        Zn = y[d + d * d + m * d :].reshape(m, d)
        return z, St, Zl, Zn

    y = np.concatenate([z0, np.eye(d).ravel(), X0.ravel(), X0.ravel()])
    d0 = np.linalg.norm(X0 - z0, axis=1)
    k_sup = 0.0
    dists = [np.zeros(m)]
    times = [0.0]

    for a, b in _segments(H, t_end):
        Hp = H.piece(a, b)

        def field(t, y, Hp=Hp):
            z, St, Zl, Zn = unpack(y)
            g = Hp.gradient(z, t)
            Hz = Hp.hessian(z, t)
            dz = J @ g
            dS = J @ Hz @ St
            dZl = (g + (Zl - z) @ Hz.T) @ J.T
            dZn = Hp.gradient(Zn, t) @ J.T
            return np.concatenate([dz, dS.ravel(), dZl.ravel(), dZn.ravel()])

        ts, ys = _rk4(field, y, a, b, dt)
        for t, yy in zip(ts[1:], ys[1:]):
            z, _, _, Zn = unpack(yy)
            pts = np.concatenate([Zn, 0.5 * (Zn + z), z[None]])
            hs = Hp.hessian(pts, t)
            k_sup = max(k_sup, float(np.max(np.abs(np.linalg.eigvalsh(hs)))))
            dists.append(np.linalg.norm(Zn - z, axis=1))
            times.append(float(t))
        y = ys[-1]

    z, St, Zl, Zn = unpack(y)
    Minv = np.linalg.inv(St @ S)
    r0 = np.linalg.norm(U, axis=1) / np.sqrt(hbar)
    r_lin = np.linalg.norm((Zl - z) @ Minv.T, axis=1) / np.sqrt(hbar)
    r_nl = np.linalg.norm((Zn - z) @ Minv.T, axis=1) / np.sqrt(hbar)
    ident = float(np.max(np.linalg.norm((Zl - z) - (X0 - z0) @ St.T, axis=1)))

    times = np.asarray(times)
    dists = np.asarray(dists)
    env = np.exp(k_sup * np.abs(times))[:, None] * d0[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(env > 0, dists / env, 0.0)
    max_ratio = float(np.max(ratio))

    return BlobTransportReport(
        sample_count=int(m),
        t_end=float(t_end),
        identity_residual=ident,
        radius_residual=float(np.max(np.abs(r_lin - r0))),
        linear_inside=bool(np.all(r_lin <= 1 + tol)),
        nonlinear_inside_fraction=float(np.mean(r_nl <= 1 + tol)),
        nonlinear_max_excess=float(max(0.0, np.max(r_nl) - 1.0)),
        gronwall_k=k_sup,
        gronwall_max_ratio=max_ratio,
        gronwall_ok=bool(max_ratio <= 1 + 1e-9),
    )
