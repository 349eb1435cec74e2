"""JSON encoding and decoding of matrices, ellipsoids, subspaces, states and beam configs.

Matrices are either a bare list of rows or ``{"n": n, "rows": [...]}``,
where ``n`` is the number of degrees of freedom (a phase-space matrix is
``2n x 2n``). Output floats are rounded to 12 significant digits so reports
are stable across platforms.
"""

import json

import numpy as np

from .beams import Quadratic, harmonic_oscillator, polynomial_potential
from .ellipsoid import Ellipsoid, Subspace
from .errors import DomainError
from .lagrangian import (
    GaussianState,
    GeometricState,
    LagrangianFrame,
    LagrangianPlane,
    MixedGeometricState,
    canonical_frame,
    standard_state,
)

DIGITS = 12


class SchemaError(ValueError):
    """Input is well-formed JSON but does not match the expected layout."""


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing field '{key}'")
    return obj[key]


def parse_matrix(obj, where="matrix", phase_space=False):
    """Decode a matrix; with ``phase_space=True`` a declared ``n`` must match ``2n`` rows."""
    rows = obj["rows"] if isinstance(obj, dict) and "rows" in obj else obj
    try:
        M = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{where}: rows must be a rectangular list of numbers") from None
    if M.ndim != 2 or M.size == 0:
        raise SchemaError(f"{where}: expected a non-empty 2-D array of numbers")
    if isinstance(obj, dict) and "n" in obj:
        n = obj["n"]
        expected = 2 * n if phase_space else n
        if not isinstance(n, int) or M.shape[0] != expected:
            raise SchemaError(f"{where}: declared n = {n} does not match {M.shape[0]} rows")
    return M


def parse_vector(obj, where="vector"):
    try:
        v = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{where}: expected a list of numbers") from None
    if v.ndim != 1:
        raise SchemaError(f"{where}: expected a flat list of numbers")
    return v


def _hbar(obj, override):
    if override is not None:
        return float(override)
    h = obj.get("hbar", 1.0) if isinstance(obj, dict) else 1.0
    if not isinstance(h, (int, float)):
        raise SchemaError("hbar must be a number")
    return float(h)


def parse_ellipsoid(obj, hbar=None, where="ellipsoid", phase_space=True):
    """``{"Q": matrix, "center": [...], "hbar": h}``.

    With ``phase_space=False`` (position or momentum factors) a declared
    ``n`` is the matrix size rather than half of it.
    """
    Q = parse_matrix(_require(obj, "Q", where), f"{where}.Q", phase_space=phase_space)
    c = obj.get("center")
    return Ellipsoid(Q, None if c is None else parse_vector(c, f"{where}.center"), _hbar(obj, hbar))


def parse_subspace(obj, where="subspace"):
    """``{"basis": rows}``: rows of the d x k matrix whose columns span the subspace."""
    return Subspace(parse_matrix(_require(obj, "basis", where), f"{where}.basis"))


def parse_frame(obj, where="frame"):
    ell = parse_matrix(_require(obj, "ell", where), f"{where}.ell")
    ellp = parse_matrix(_require(obj, "ellPrime", where), f"{where}.ellPrime")
    return LagrangianFrame(LagrangianPlane(ell), LagrangianPlane(ellp))


def parse_state(obj, hbar=None, where="state"):
    """Geometric (pure or mixed) or Gaussian state.

    Geometric: ``{"kind": "geometric", "frame": {"ell": rows, "ellPrime": rows},
    "shapeX": matrix, "shapeP": matrix (mixed only), "center": [...], "hbar": h}``.
    Plane bases are given as the rows of 2n x n matrices whose columns span
    the plane. ``frame`` may be omitted for the canonical frame.
    Gaussian: ``{"kind": "gaussian", "A": matrix, "B": matrix, "center": [...], "hbar": h}``.
    """
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    kind = obj.get("kind", "geometric")
    h = _hbar(obj, hbar)
    c = obj.get("center")
    center = None if c is None else parse_vector(c, f"{where}.center")
    if kind == "gaussian":
        A = parse_matrix(_require(obj, "A", where), f"{where}.A")
        B = parse_matrix(obj.get("B", np.zeros_like(A).tolist()), f"{where}.B")
        return GaussianState(A, B, center, h)
    if kind == "geometric":
        shape_x = parse_matrix(_require(obj, "shapeX", where), f"{where}.shapeX")
        frame = parse_frame(obj["frame"]) if "frame" in obj else canonical_frame(shape_x.shape[0])
        if "shapeP" in obj:
            shape_p = parse_matrix(obj["shapeP"], f"{where}.shapeP")
            return MixedGeometricState(frame, shape_x, shape_p, center, h)
        return GeometricState(frame, shape_x, center, h)
    raise SchemaError(f"{where}: kind must be 'geometric' or 'gaussian'")


def parse_hamiltonian(obj, where="hamiltonian"):
    """Hamiltonian description.

    - ``{"kind": "quadratic", "M": matrix}``
    - ``{"kind": "quadratic", "breakpoints": [...], "matrices": [matrix, ...]}``
    - ``{"kind": "harmonic", "n": n, "omega": w}``
    - ``{"kind": "kinetic_potential", "n": n, "coefficients": [c0, c1, ...], "cutoff": R}``:
      separable polynomial potential ``sum_j sum_k c_k x_j^k``
    """
    kind = _require(obj, "kind", where)
    if kind == "quadratic":
        if "matrices" in obj:
            mats = [parse_matrix(m, f"{where}.matrices", phase_space=True) for m in obj["matrices"]]
            return Quadratic.piecewise(obj.get("breakpoints", []), mats)
        return Quadratic(parse_matrix(_require(obj, "M", where), f"{where}.M", phase_space=True))
    if kind == "harmonic":
        return harmonic_oscillator(int(_require(obj, "n", where)), float(obj.get("omega", 1.0)))
    if kind == "kinetic_potential":
        n = _require(obj, "n", where)
        coeffs = parse_vector(_require(obj, "coefficients", where), f"{where}.coefficients")
        return polynomial_potential(int(n), coeffs, obj.get("cutoff"))
    raise SchemaError(f"{where}: unknown kind '{kind}'")


def parse_beam_config(obj, hbar=None, dt=None, t_end=None):
    """Beam experiment config; returns ``(H, state, t_end, dt, snapshots)``.

    ``state`` defaults to the standard state centered at ``z0``; when both are
    given, ``z0`` replaces the state's center.
    """
    H = parse_hamiltonian(_require(obj, "hamiltonian", "config"))
    h = _hbar(obj, hbar)
    if "state" in obj:
        state = parse_state(obj["state"], hbar=hbar if hbar is not None else obj["state"].get("hbar", h))
    else:
        state = standard_state(H.n, h)
    if "z0" in obj:
        z0 = parse_vector(obj["z0"], "config.z0")
        state = _recenter(state, z0)
    if state.n != H.n:
        raise DomainError("state and Hamiltonian have different dimensions")
    te = float(t_end if t_end is not None else _require(obj, "tEnd", "config"))
    step = float(dt if dt is not None else obj.get("dt", 1e-3))
    snaps = obj.get("snapshots", 1)
    if not isinstance(snaps, int) or snaps < 1:
        raise SchemaError("config.snapshots must be a positive integer")
    return H, state, te, step, snaps


def _recenter(state, z0):
    if isinstance(state, GaussianState):
        return GaussianState(state.A, state.B, z0, state.hbar)
    if isinstance(state, MixedGeometricState):
        return MixedGeometricState(state.frame, state.shape_x, state.shape_p, z0, state.hbar, state.tol)
    return GeometricState(state.frame, state.shape_x, z0, state.hbar)


def _round(x):
    if x == 0 or not np.isfinite(x):
        return 0.0 if x == 0 else float(x)
    return float(f"{x:.{DIGITS}g}")


def to_jsonable(obj):
    """Recursively convert numpy data to JSON-ready lists with rounded floats."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    return obj


def dumps(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True, allow_nan=True)


def ellipsoid_json(E):
    return {"Q": E.Q, "center": E.center, "hbar": E.hbar}


def state_json(state):
    if isinstance(state, GaussianState):
        return {"kind": "gaussian", "A": state.A, "B": state.B, "center": state.center, "hbar": state.hbar}
    out = {
        "kind": "geometric",
        "frame": {"ell": state.frame.ell.basis, "ellPrime": state.frame.ell_prime.basis},
        "shapeX": state.shape_x,
        "center": state.center,
        "hbar": state.hbar,
    }
    if isinstance(state, MixedGeometricState):
        out["shapeP"] = state.shape_p
    return out
