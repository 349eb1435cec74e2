"""Symplectic capacities of ellipsoids and of geometric-state products.

All symplectic capacities agree on ellipsoids: for ``{Mz.z <= hbar}`` the
common value is ``pi hbar / lambda_max`` with ``lambda_max`` the largest
symplectic eigenvalue of M. For a product ``X x P`` of a position and a
momentum body the maximal capacity is ``4 hbar sup{lam : lam X^hbar in P}``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .beams import Quadratic, flow
from .ellipsoid import Ellipsoid, _require_centered
from .errors import DimensionError, NumericalError
from .lagrangian import MixedGeometricState, john_of_state
from .symplectic import half_dim, sym_sqrt, symplectic_eigenvalues, williamson

STATE_TOL = 1e-9


@dataclass(frozen=True)
class CapacityResult:
    """Capacity value (units of action) with the kind of formula used and supporting data."""

    value: float
    kind: str
    witness: dict = field(default_factory=dict)

    def as_dict(self):
        return {"capacity": self.value, "kind": self.kind, "witness": dict(self.witness)}


def capacity_ellipsoid(E):
    """``pi hbar / lambda_max`` for a centered ellipsoid; shared by every capacity (HZ, Gromov, linear)."""
    _require_centered(E, "capacity")
    lam = symplectic_eigenvalues(E.Q)
    return CapacityResult(
        float(np.pi * E.hbar / lam[0]),
        "ellipsoid",
        {"lambda_max": float(lam[0])},
    )


def capacity_dual(E):
    """Capacity of the symplectic polar dual, ``pi hbar lambda_min``.

    The dual has shape ``-J M^{-1} J`` whose symplectic eigenvalues are the
    reciprocals of those of M.
    """
    _require_centered(E, "capacity")
    lam = symplectic_eigenvalues(E.Q)
    return CapacityResult(
        float(np.pi * E.hbar * lam[-1]),
        "dual",
        {"lambda_min": float(lam[-1])},
    )


def hz_orbit_action(E, dt=1e-3):
    """Action ``int p dx`` of the shortest closed characteristic of the boundary, by integration.

    The boundary point on the Williamson block with the largest symplectic
    eigenvalue is flowed under ``H = M z.z / 2`` for one period
    ``2 pi / lambda_max``; the action is integrated with Simpson's rule.
    Serves as an independent check of :func:`capacity_ellipsoid`.
    """
    _require_centered(E, "capacity")
    n = half_dim(E.Q)
    wf = williamson(E.Q)
    lam = wf.spectrum[0]
    w = np.zeros(2 * n)
    w[0] = np.sqrt(E.hbar / lam)
    z0 = np.linalg.solve(wf.S, w)
    H = Quadratic(E.Q)
    traj = flow(H, z0, 2 * np.pi / lam, dt)
    closure = float(np.max(np.abs(traj.points[-1] - z0)))
    xdot = (traj.points @ E.Q)[:, n:]  # dx/dt = dH/dp
    integrand = np.einsum("ki,ki->k", traj.points[:, n:], xdot)
    return float(simpson(integrand, x=traj.times)), closure


def _product_pair(X, P):
    for E in (X, P):
        _require_centered(E, "product capacity")
    if X.dim != P.dim:
        raise DimensionError("position and momentum factors must have equal dimension")
    if not np.isclose(X.hbar, P.hbar, rtol=1e-12, atol=0.0):
        raise DimensionError("factors must share the same hbar")


def cmax_product(X, P):
    """``4 hbar sup{lam > 0 : lam X^hbar in P}`` for ``X = {A x.x <= hbar}``, ``P = {B p.p <= hbar}``.

    ``X^hbar`` has shape ``A^{-1}``, so ``lam X^hbar in P`` iff
    ``B <= A^{-1} / lam^2`` in the Loewner order, i.e. ``lam <= mu_max^{-1/2}``
    with ``mu_max`` the largest eigenvalue of ``A B`` (computed as the
    symmetric ``A^{1/2} B A^{1/2}``).
    """
    _product_pair(X, P)
    Ah, _ = sym_sqrt(X.Q)
    mu = np.linalg.eigvalsh(Ah @ P.Q @ Ah)
    lam = float(mu[-1] ** -0.5)
    return CapacityResult(4.0 * X.hbar * lam, "product", {"lambda": lam})


def _transported_pair(state):
    """Position and momentum factors of the state in the canonical frame."""
    K = state.frame.pairing
    Ki = np.linalg.inv(K)
    X = Ellipsoid(state.shape_x, None, state.hbar)
    if isinstance(state, MixedGeometricState):
        shape_p = Ki.T @ state.shape_p @ Ki
    else:
        shape_p = np.linalg.inv(state.shape_x)
    return X, Ellipsoid(0.5 * (shape_p + shape_p.T), None, state.hbar)


def state_capacities(state, tol=STATE_TOL):
    """Maximal (and Hofer-Zehnder) capacity of a geometric state.

    The frame transport is symplectic, so the capacity equals that of the
    transported product ``X x P`` in the canonical frame, given by
    :func:`cmax_product`. For pure states ``P = X^hbar`` and the value is
    ``4 hbar``; this is cross-checked against the closed form. The witness
    also carries the linear minimal capacity: the largest symplectic ball
    image inside a pure state is its John ellipsoid, of capacity ``pi hbar``.
    """
    X, P = _transported_pair(state)
    res = cmax_product(X, P)
    john = capacity_ellipsoid(Ellipsoid(john_of_state(state).Q, None, state.hbar))
    pure = not isinstance(state, MixedGeometricState)
    if pure and abs(res.value - 4.0 * state.hbar) > tol * 4.0 * state.hbar:
        raise NumericalError(
            "transported product capacity disagrees with 4 hbar",
            residual=abs(res.value - 4.0 * state.hbar),
        )
    witness = {
        "lambda": res.witness["lambda"],
        "pure": pure,
        "c_min_lin": john.value,
    }
    value = 4.0 * state.hbar if pure else res.value
    return CapacityResult(float(value), "product", witness)

