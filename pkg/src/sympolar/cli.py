"""Command-line front end: ``sympolar <subcommand> INPUT [options]``.

Every subcommand reads one JSON file and writes one JSON report (``beam``
writes JSON lines). Exit codes: 0 success, 2 unreadable or malformed input,
3 domain error, 4 numerical failure. Output is assembled completely before
anything is written, and files are replaced atomically.
"""

import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np

from . import io
from .admissibility import (
    admissibility_report,
    covariance_from_shape,
    is_quantum_blob,
    narcowich_report,
    purity,
)
from .beams import beam_snapshots
from .capacity import capacity_dual, capacity_ellipsoid, cmax_product, state_capacities
from .ellipsoid import (
    Ellipsoid,
    contains,
    intersect_subspace,
    polar_dual,
    project,
    symplectic_polar_dual,
    ball_volume,
    volume,
)
from .errors import DomainError, NumericalError
from .lagrangian import (
    GaussianState,
    MixedGeometricState,
    from_gaussian,
    gaussian_covariance,
    john_of_state,
    state_signature,
    to_gaussian,
    wigner_matrix,
)
from .symplectic import standard_J, symplectic_residual, williamson

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 2, 3, 4

log = logging.getLogger("sympolar")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="input JSON file")
    common.add_argument("--hbar", type=_positive(float), default=None, help="override hbar (default: from input, else 1)")
    common.add_argument("--tol", type=_positive(float), default=1e-9, help="decision tolerance")
    common.add_argument("--seed", type=_nonneg_int, default=0, help="seed for sampled criteria")
    common.add_argument("--planes", type=_positive(int), default=64, help="tomography plane budget")
    common.add_argument("--dt", type=_positive(float), default=None, help="RK4 step")
    common.add_argument("--t-end", type=float, default=None, help="final time")
    common.add_argument("--output", "-o", default=None, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="sympolar", description="Symplectic polar duality toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("williamson", "Williamson normal form of a symmetric positive definite matrix"),
        ("admissible", "admissibility criteria for a covariance matrix or ellipsoid"),
        ("dual", "polar and symplectic polar duals of an ellipsoid"),
        ("capacity", "symplectic capacities of an ellipsoid, product or state"),
        ("state", "geometric state / Gaussian correspondence"),
        ("beam", "first-order Gaussian beam propagation"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def cmd_williamson(data, args):
    M = io.parse_matrix(data, "matrix", phase_space=True)
    wf = williamson(M)
    rec = wf.S.T @ wf.D @ wf.S - M
    return {
        "S": wf.S,
        "spectrum": wf.spectrum,
        "residuals": {
            "reconstruction": float(np.linalg.norm(rec) / np.linalg.norm(M)),
            "symplectic": symplectic_residual(wf.S),
        },
    }


def _admissible_input(data, hbar):
    if isinstance(data, dict) and "Q" in data:
        return io.parse_ellipsoid(data, hbar), None
    src = data["covariance"] if isinstance(data, dict) and "covariance" in data else data
    Sigma = io.parse_matrix(src, "covariance", phase_space=True)
    h = hbar if hbar is not None else (data.get("hbar", 1.0) if isinstance(data, dict) else 1.0)
    return None, (Sigma, float(h))


def cmd_admissible(data, args):
    E, cov = _admissible_input(data, args.hbar)
    if E is not None:
        rep = admissibility_report(E=E, planes=args.planes, seed=args.seed, tol=args.tol)
        Sigma = covariance_from_shape(E.Q, E.hbar)
    else:
        Sigma, h = cov
        rep = admissibility_report(Sigma=Sigma, hbar=h, planes=args.planes, seed=args.seed, tol=args.tol)
    h = rep.hbar
    return {
        "hbar": h,
        "spectrum": rep.spectrum,
        "verdicts": {
            "spectrum": rep.by_spectrum,
            "inclusion": rep.by_inclusion,
            "tomography": rep.by_tomography,
            "positivity": rep.by_positivity,
            "robertsonSchroedinger": rep.by_rs,
        },
        "consistent": rep.consistent,
        "margins": rep.margins,
        "narcowich": narcowich_report(Sigma, h, args.planes, args.seed, args.tol).as_dict(),
        "purity": purity(Sigma, h),
    }


def cmd_dual(data, args):
    E = io.parse_ellipsoid(data, args.hbar)
    D = polar_dual(E)
    Ds = symplectic_polar_dual(E)
    out = {
        "polar": io.ellipsoid_json(D),
        "symplectic": io.ellipsoid_json(Ds),
        "volumes": {
            "ellipsoid": volume(E),
            "symplecticDual": volume(Ds),
            "product": volume(E) * volume(Ds),
            "ballSquared": ball_volume(E.dim, E.hbar) ** 2,
        },
        "involutionResidual": float(np.max(np.abs(symplectic_polar_dual(Ds).Q - E.Q)) / np.max(np.abs(E.Q))),
        "isQuantumBlob": is_quantum_blob(E, args.tol),
        "containsDual": contains(E, Ds, args.tol),
    }
    if isinstance(data, dict) and "subspace" in data:
        F = io.parse_subspace(data["subspace"])
        proj_dual = polar_dual(project(E, F))
        sect = intersect_subspace(D, F)
        out["subspace"] = {
            "projectionDual": proj_dual.Q,
            "dualSection": sect.Q,
            "identityResidual": float(np.max(np.abs(proj_dual.Q - sect.Q)) / np.max(np.abs(sect.Q))),
        }
    return out


def cmd_capacity(data, args):
    if not isinstance(data, dict):
        raise io.SchemaError("capacity input must be an object")
    if "X" in data and "P" in data:
        X = io.parse_ellipsoid(data["X"], args.hbar, "X", phase_space=False)
        P = io.parse_ellipsoid(data["P"], args.hbar, "P", phase_space=False)
        return cmax_product(X, P).as_dict()
    if "kind" in data:
        st = io.parse_state(data, args.hbar)
        if isinstance(st, GaussianState):
            st = from_gaussian(st)
        return state_capacities(st, tol=max(args.tol, 1e-9)).as_dict()
    E = io.parse_ellipsoid(data, args.hbar)
    c = capacity_ellipsoid(E)
    cd = capacity_dual(E)
    out = c.as_dict()
    out["dual"] = cd.as_dict()
    out["product"] = c.value * cd.value
    out["productBound"] = (np.pi * E.hbar) ** 2
    return out


def _max_diff(a, b):
    return float(max(np.max(np.abs(np.asarray(a[k]) - np.asarray(b[k]))) for k in a))


def cmd_state(data, args):
    st = io.parse_state(data, args.hbar)
    if isinstance(st, GaussianState):
        geo = from_gaussian(st)
        back = to_gaussian(geo)
        return {
            "geometric": io.state_json(geo),
            "wigner": wigner_matrix(st),
            "covariance": gaussian_covariance(st),
            "purity": purity(gaussian_covariance(st), st.hbar),
            "roundtripResidual": float(max(np.max(np.abs(back.A - st.A)), np.max(np.abs(back.B - st.B)))),
        }
    john = john_of_state(st)
    out = {
        "john": io.ellipsoid_json(john),
        "johnIsQuantumBlob": is_quantum_blob(Ellipsoid(john.Q, None, john.hbar), 1e-7),
        "capacity": state_capacities(st).as_dict(),
    }
    if isinstance(st, MixedGeometricState):
        return out
    g = to_gaussian(st)
    back = from_gaussian(g)
    g2 = to_gaussian(back)
    out.update(
        {
            "gaussian": io.state_json(g),
            "wigner": wigner_matrix(g),
            "gaussianRoundtripResidual": float(max(np.max(np.abs(g2.A - g.A)), np.max(np.abs(g2.B - g.B)))),
            "productSetRoundtripResidual": _max_diff(state_signature(st), state_signature(back)),
        }
    )
    return out


def _shape_signature(state):
    if isinstance(state, GaussianState):
        return {"A": state.A, "B": state.B}
    sig = state_signature(state)
    sig.pop("center")
    if isinstance(state, MixedGeometricState):
        F = state.frame.ell_prime.basis
        sig["p_body"] = F @ np.linalg.inv(state.shape_p) @ F.T
    return sig


def cmd_beam(data, args):
    H, state, t_end, dt, snaps = io.parse_beam_config(data, args.hbar, args.dt, args.t_end)
    states = beam_snapshots(H, state, t_end, dt, snaps)
    lines = []
    for b in states:
        lines.append(
            {"t": b.t, "z": b.z, "S": b.S, "gamma": b.gamma, "drift": b.drift, "payload": io.state_json(b.payload)}
        )
    final = states[-1]
    n = H.n
    J = standard_J(n)
    lines.append(
        {
            "report": {
                "maxDrift": final.drift,
                "payloadShapeChange": _max_diff(_shape_signature(state), _shape_signature(final.payload)),
                "centerDisplacement": float(np.linalg.norm(final.z - state.center)),
                "energyChange": float(abs(H.value(final.z, final.t) - H.value(state.center, 0.0))),
                "finalSymplecticResidual": float(np.max(np.abs(final.S.T @ J @ final.S - J))),
            }
        }
    )
    return lines


COMMANDS = {
    "williamson": cmd_williamson,
    "admissible": cmd_admissible,
    "dual": cmd_dual,
    "capacity": cmd_capacity,
    "state": cmd_state,
    "beam": cmd_beam,
}


def _render(result):
    if isinstance(result, list):
        return "".join(io.dumps(r) + "\n" for r in result)
    return io.dumps(result) + "\n"


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sympolar-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _configure_logging():
    level = os.environ.get("SDK_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    if args.t_end is not None and not (np.isfinite(args.t_end) and args.t_end >= 0):
        print("error: --t-end must be finite and non-negative", file=sys.stderr)
        return EXIT_PARSE
    try:
        data = io.load_json(args.input)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    log.info("running %s on %s", args.command, args.input)
    try:
        text = _render(COMMANDS[args.command](data, args))
    except io.SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"domain error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (KeyError, TypeError, AttributeError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _write(text, args.output)
    return EXIT_OK
