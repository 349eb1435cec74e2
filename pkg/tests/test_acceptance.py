"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines are collected into a terminal summary section) or
directly with ``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate
from scipy.linalg import expm

from helpers import random_pd, random_sym
from oracles import J_matrix, psi, siegel_action, symplectic_spectrum
from sympolar.admissibility import (
    admissible_by_inclusion,
    admissible_by_spectrum,
    admissible_by_tomography,
    covariance_from_shape,
    is_quantum_blob,
    positivity_check,
)
from sympolar.beams import (
    Quadratic,
    beam_propagate,
    blob_transport_check,
    flow,
    harmonic_oscillator,
    polynomial_potential,
)
from sympolar.capacity import capacity_dual, capacity_ellipsoid, state_capacities
from sympolar.ellipsoid import (
    Ellipsoid,
    Subspace,
    intersect_subspace,
    polar_dual,
    project,
    symplectic_polar_dual,
    volume,
)
from sympolar.lagrangian import (
    GaussianState,
    GeometricState,
    LagrangianFrame,
    LagrangianPlane,
    from_gaussian,
    gaussian_from_wigner,
    john_of_state,
    to_gaussian,
    wigner_function,
    wigner_matrix,
)
from sympolar.symplectic import random_symplectic, williamson

RESULTS = []


def _rel(A, B):
    return float(np.linalg.norm(A - B) / np.linalg.norm(B))


def criterion_1():
    """Williamson reconstruction and symplecticity on 200 random PD matrices, under 5 s."""
    rng = np.random.default_rng(101)
    worst_rec = worst_sp = worst_spec = 0.0
    start = time.perf_counter()
    for k in range(200):
        n = 1 + k % 4
        M = random_pd(2 * n, rng, cond=10.0 ** rng.uniform(0, 4))
        wf = williamson(M)
        worst_rec = max(worst_rec, np.linalg.norm(wf.S.T @ wf.D @ wf.S - M) / np.linalg.norm(M))
        worst_sp = max(worst_sp, np.linalg.norm(wf.S.T @ J_matrix(n) @ wf.S - J_matrix(n)))
        worst_spec = max(worst_spec, np.max(np.abs(wf.spectrum / symplectic_spectrum(M) - 1)))
    elapsed = time.perf_counter() - start
    ok = worst_rec <= 1e-8 and worst_sp <= 1e-9 and worst_spec <= 1e-7 and elapsed < 5.0
    return ok, (
        f"reconstruction {worst_rec:.1e} (<=1e-8), symplectic {worst_sp:.1e} (<=1e-9), "
        f"spectrum vs eig(JM) {worst_spec:.1e}, {elapsed:.2f}s (<5s)"
    )


def criterion_2():
    """Symplectic duality is an involution and commutes with Sp(n), 200 pairs, 1e-9 relative."""
    rng = np.random.default_rng(202)
    worst_inv = worst_cov = 0.0
    for k in range(200):
        n = 1 + k % 4
        E = Ellipsoid(random_pd(2 * n, rng, cond=100.0), None, rng.uniform(0.2, 3.0))
        S = random_symplectic(n, rng)
        worst_inv = max(worst_inv, _rel(symplectic_polar_dual(symplectic_polar_dual(E)).Q, E.Q))
        lhs = symplectic_polar_dual(E).image(S)
        rhs = symplectic_polar_dual(E.image(S))
        worst_cov = max(worst_cov, _rel(lhs.Q, rhs.Q))
    ok = worst_inv <= 1e-9 and worst_cov <= 1e-9
    return ok, f"involution {worst_inv:.1e}, covariance {worst_cov:.1e} (<=1e-9)"


def criterion_3():
    """Self-duality holds exactly for quantum blobs: 100 blobs and 100 perturbed non-blobs."""
    rng = np.random.default_rng(303)
    bad = 0
    for k in range(200):
        n = 1 + k % 3
        S = random_symplectic(n, rng)
        if k < 100:
            lam = np.ones(n)
        else:
            delta = rng.uniform(2e-4, 0.5, size=n) * rng.choice([-1.0, 1.0], size=n)
            lam = 1.0 + delta
        M = S.T @ np.diag(np.concatenate([lam, lam])) @ S
        E = Ellipsoid(M)
        self_dual = _rel(symplectic_polar_dual(E).Q, M) <= 1e-8
        blob = is_quantum_blob(E)
        expected = k < 100
        if not (self_dual == blob == expected):
            bad += 1
    return bad == 0, f"{200 - bad}/200 agree (100 blobs, 100 non-blobs with margin > 1e-4)"


def criterion_4():
    """Spectrum, inclusion and positivity verdicts agree on 500 shapes; tomography one-sided."""
    rng = np.random.default_rng(404)
    start = time.perf_counter()
    disagree = tom_wrong = checked = diag_wrong = 0
    while checked < 500:
        n = int(rng.integers(1, 5))
        h = rng.uniform(0.3, 2.0)
        S = random_symplectic(n, rng)
        lam = np.exp(rng.uniform(np.log(0.2), np.log(2.0), size=n))
        M = S.T @ np.diag(np.concatenate([lam, lam])) @ S
        if abs(1 - symplectic_spectrum(M)[0]) <= 1e-6:
            continue
        checked += 1
        E = Ellipsoid(M, None, h)
        spec = admissible_by_spectrum(E)[0]
        inc = admissible_by_inclusion(E)
        pos = positivity_check(covariance_from_shape(M, h), h)[0]
        if not (spec == inc == pos == (symplectic_spectrum(M)[0] <= 1)):
            disagree += 1
        if not admissible_by_tomography(E, seed=checked) and spec:
            tom_wrong += 1
    for k in range(100):
        n = 1 + k % 4
        lam = np.exp(rng.uniform(np.log(0.2), np.log(2.0), size=n))
        if abs(1 - lam.max()) <= 1e-6:
            continue
        E = Ellipsoid(np.diag(np.concatenate([lam, lam])))
        if admissible_by_tomography(E, seed=k) != admissible_by_spectrum(E)[0]:
            diag_wrong += 1
    elapsed = time.perf_counter() - start
    ok = disagree == 0 and tom_wrong == 0 and diag_wrong == 0 and elapsed < 10.0
    return ok, (
        f"exact criteria disagree on {disagree}/500, tomography false-on-admissible {tom_wrong}, "
        f"Williamson-diagonal mismatches {diag_wrong}/100, {elapsed:.2f}s (<10s)"
    )


def criterion_5():
    """Volume product equals the squared ball volume; capacity product bound and its equality case."""
    rng = np.random.default_rng(505)
    worst_vol = 0.0
    strict = True
    worst_eq = 0.0
    for k in range(100):
        n = 1 + k % 4
        h = rng.uniform(0.2, 3.0)
        M = random_pd(2 * n, rng, cond=100.0)
        E = Ellipsoid(M, None, h)
        ball_vol = (math.pi * h) ** n / math.factorial(n)
        worst_vol = max(worst_vol, abs(volume(E) * volume(symplectic_polar_dual(E)) / ball_vol**2 - 1))
        prod = capacity_ellipsoid(E).value * capacity_dual(E).value
        lam = symplectic_spectrum(M)
        if lam[0] / lam[-1] > 1 + 1e-6 and not prod < (math.pi * h) ** 2 * (1 - 1e-8):
            strict = False
        if prod > (math.pi * h) ** 2 * (1 + 1e-12):
            strict = False
        r = rng.uniform(0.1, 5.0)
        B = Ellipsoid(np.eye(2 * n) / r**2, None, h)
        prod_ball = capacity_ellipsoid(B).value * capacity_dual(B).value
        worst_eq = max(worst_eq, abs(prod_ball / (math.pi * h) ** 2 - 1))
    ok = worst_vol <= 1e-8 and strict and worst_eq <= 1e-8
    return ok, (
        f"volume product error {worst_vol:.1e} (<=1e-8), strict inequality off-round {strict}, "
        f"equality error on scaled balls {worst_eq:.1e} (<=1e-8)"
    )


def criterion_6():
    """Projection and intersection exchange under polar duality, 200 pairs, 1e-8."""
    rng = np.random.default_rng(606)
    worst = 0.0
    for k in range(200):
        n = 1 + k % 3
        E = Ellipsoid(random_pd(2 * n, rng, cond=100.0), None, rng.uniform(0.3, 2.0))
        kind = k % 3
        S = random_symplectic(n, rng)
        if kind == 0:
            F = Subspace(S[:, [0, n]])  # symplectic plane
        elif kind == 1:
            F = Subspace(S[:, :n])  # null (Lagrangian) plane
        else:
            F = Subspace(rng.standard_normal((2 * n, int(rng.integers(1, 2 * n + 1)))))
        B = F.basis
        Q = E.Q
        proj_dual = polar_dual(project(E, F)).Q
        sect_dual = intersect_subspace(polar_dual(E), F).Q
        closed_form = B.T @ np.linalg.inv(Q) @ B
        worst = max(worst, _rel(proj_dual, sect_dual), _rel(proj_dual, closed_form))
        worst = max(worst, _rel(polar_dual(intersect_subspace(E, F)).Q, project(polar_dual(E), F).Q))
    return worst <= 1e-8, f"worst shape error {worst:.1e} (<=1e-8) over symplectic, null and generic subspaces"


def criterion_7():
    """Gaussian roundtrip, Wigner-matrix validity and block recovery on 200 random Gaussians."""
    rng = np.random.default_rng(707)
    worst_rt = worst_det = worst_rec = worst_sp = 0.0
    all_pd = all_sym = True
    for k in range(200):
        n = 1 + k % 4
        g = GaussianState(random_pd(n, rng, cond=20.0), random_sym(n, rng), rng.standard_normal(2 * n), 0.7)
        back = to_gaussian(from_gaussian(g))
        worst_rt = max(
            worst_rt,
            np.max(np.abs(back.A - g.A)),
            np.max(np.abs(back.B - g.B)),
            np.max(np.abs(back.center - g.center)),
        )
        G = wigner_matrix(g)
        all_sym &= bool(np.array_equal(G, G.T))
        all_pd &= bool(np.linalg.eigvalsh(G)[0] > 0)
        worst_sp = max(worst_sp, np.max(np.abs(G.T @ J_matrix(n) @ G - J_matrix(n))) / np.max(np.abs(G)) ** 2)
        worst_det = max(worst_det, abs(np.linalg.det(G) - 1))
        A, B = gaussian_from_wigner(G)
        worst_rec = max(worst_rec, np.max(np.abs(A - g.A)), np.max(np.abs(B - g.B)))
    ok = worst_rt <= 1e-8 and all_sym and all_pd and worst_sp <= 1e-12 and worst_det <= 1e-9 and worst_rec <= 1e-9
    return ok, (
        f"roundtrip {worst_rt:.1e} (<=1e-8), symmetric {all_sym}, PD {all_pd}, "
        f"symplectic {worst_sp:.1e}, |det-1| {worst_det:.1e} (<=1e-9), block recovery {worst_rec:.1e} (<=1e-9)"
    )


def criterion_8():
    """4 hbar capacity on 100 random pure states; every John ellipsoid a blob of capacity pi hbar."""
    rng = np.random.default_rng(808)
    worst = worst_john = 0.0
    blobs = 0
    for k in range(100):
        n = 1 + k % 4
        h = rng.uniform(0.1, 2.0)
        S = random_symplectic(n, rng)
        frame = LagrangianFrame(LagrangianPlane(S[:, :n]), LagrangianPlane(S[:, n:]))
        state = GeometricState(frame, random_pd(n, rng, cond=20.0), rng.standard_normal(2 * n), h)
        res = state_capacities(state)
        # the value and the containment supremum of the transported product must both give 4 hbar
        worst = max(worst, abs(res.value - 4 * h), abs(4 * h * res.witness["lambda"] - 4 * h))
        J = john_of_state(state)
        centered = Ellipsoid(J.Q, None, h)
        blobs += is_quantum_blob(centered)
        worst_john = max(worst_john, abs(capacity_ellipsoid(centered).value / (math.pi * h) - 1))
    ok = worst <= 1e-9 and blobs == 100 and worst_john <= 1e-8
    return ok, f"capacity error {worst:.1e} (<=1e-9), John blobs {blobs}/100, John capacity error {worst_john:.1e}"


def criterion_9():
    """Quadratic beams are exact; oscillator period return and RK4 order."""
    rng = np.random.default_rng(909)
    worst = 0.0
    for k in range(20):
        n = 1 + k % 3
        bps = np.sort(rng.uniform(0.05, 0.95, size=2))
        mats = [random_sym(2 * n, rng) for _ in range(3)]
        H = Quadratic.piecewise(bps, mats)
        g = GaussianState(random_pd(n, rng, cond=5.0), random_sym(n, rng), rng.standard_normal(2 * n))
        out = beam_propagate(H, g, 1.0, 1e-3).payload
        edges = [0.0, *bps, 1.0]
        S = np.eye(2 * n)
        for a, b, M in zip(edges[:-1], edges[1:], mats):
            S = expm((b - a) * J_matrix(n) @ M) @ S
        A2, B2 = siegel_action(S, g.A, g.B)
        worst = max(worst, np.max(np.abs(out.A - A2)), np.max(np.abs(out.B - B2)), np.max(np.abs(out.center - S @ g.center)))
    z0 = np.array([1.0, 0.0])
    ho = harmonic_oscillator(1)
    period = float(np.max(np.abs(flow(ho, z0, 2 * np.pi, 1e-3).points[-1] - z0)))
    exact = np.array([np.cos(2.0), -np.sin(2.0)])
    e1 = np.linalg.norm(flow(ho, z0, 2.0, 0.02).points[-1] - exact)
    e2 = np.linalg.norm(flow(ho, z0, 2.0, 0.01).points[-1] - exact)
    ratio = e1 / e2
    ok = worst <= 1e-7 and period <= 1e-8 and 12 <= ratio <= 20
    return ok, f"beam vs exact evolution {worst:.1e} (<=1e-7), period return {period:.1e} (<=1e-8), RK4 ratio {ratio:.2f}"


def criterion_10():
    """Linearized samples stay in the transported blob; the Groenwall envelope holds for the quartic flow."""
    H = polynomial_potential(1, [0.0, 0.0, 0.5, 0.0, 0.1])
    rep = blob_transport_check(H, [0.5, 0.0], np.eye(2), 1000, 1.0, 1e-3, seed=0, hbar=1e-2)
    rng = np.random.default_rng(1010)
    H2 = polynomial_potential(2, [0.0, 0.0, 0.5, 0.0, 0.1])
    rep2 = blob_transport_check(H2, rng.standard_normal(4), random_symplectic(2, rng), 1000, 1.0, 1e-3, seed=1, hbar=1e-2)
    worst = max(rep.identity_residual, rep.radius_residual, rep2.identity_residual, rep2.radius_residual)
    ok = worst <= 1e-7 and rep.linear_inside and rep2.linear_inside and rep.gronwall_ok and rep2.gronwall_ok
    return ok, (
        f"linearized residual {worst:.1e} (<=1e-7), inside {rep.linear_inside and rep2.linear_inside}, "
        f"Groenwall ratio {max(rep.gronwall_max_ratio, rep2.gronwall_max_ratio):.4f} (<=1, k={rep.gronwall_k:.3f}), "
        f"nonlinear inside fraction {rep.nonlinear_inside_fraction:.3f}"
    )


def criterion_11():
    """Integrating the Wigner function over momentum gives |psi|^2 pointwise, 10 random (A, B)."""
    rng = np.random.default_rng(1111)
    worst = 0.0
    for _ in range(10):
        A, B, h = rng.uniform(0.3, 3.0), rng.uniform(-2.0, 2.0), rng.uniform(0.2, 2.0)
        g = GaussianState([[A]], [[B]], None, h)
        for x in np.linspace(-2.0, 2.0, 21):
            marg = integrate.quad(lambda p: wigner_function(g, [x, p]), -np.inf, np.inf, epsabs=1e-13)[0]
            worst = max(worst, abs(marg - abs(psi(A, B, h, x)) ** 2))
    return worst <= 1e-6, f"worst pointwise error {worst:.1e} (<=1e-6) on a 21-point grid"


def criterion_12():
    """Every subcommand reproduces its golden file byte for byte."""
    from test_cli import CASES, GOLDEN, argv_for, run_cli

    mismatched = []
    commands = set()
    for case in sorted(CASES):
        res = run_cli(argv_for(case))
        commands.add(CASES[case][0])
        if res.returncode != 0 or res.stdout != (GOLDEN / f"{case}.json").read_text(encoding="utf-8"):
            mismatched.append(case)
    ok = not mismatched and commands == {"williamson", "admissible", "dual", "capacity", "state", "beam"}
    return ok, f"{len(CASES) - len(mismatched)}/{len(CASES)} golden files match, subcommands {sorted(commands)}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 13)}


def run(k):
    ok, detail = CRITERIA[k]()
    line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    RESULTS.append(line)
    return ok, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_acceptance(k):
    ok, line = run(k)
    assert ok, line


if __name__ == "__main__":
    import sys

    failures = [k for k in sorted(CRITERIA) if not run(k)[0]]
    sys.exit(1 if failures else 0)
