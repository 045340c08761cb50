"""Acceptance criteria 1-8; each test prints one PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) to print only the verdict lines.
"""

import sys
import time
from fractions import Fraction as F

import numpy as np

from holistic_burgers.assembly import DomainConfig, assemble
from holistic_burgers.closures import (
    DIRICHLET,
    G3,
    NEUMANN,
    PRINTED,
    BoundarySignal,
    BoundarySpec,
    boundary_rhs,
    closure_for,
    resolve_signs,
)
from holistic_burgers.integrate import IntegratorConfig, integrate, step_plan
from holistic_burgers.interior import equivalent_pde_rhs, interior_rhs
from holistic_burgers.oracles import (
    KinkProblem,
    convergence_study,
    fit_until_floor,
    kink_derivatives,
    kink_solution,
    reference_solve,
    run_kink,
    verify_structural,
)
from holistic_burgers.stencil import GridField

import test_closures

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # running as a script from elsewhere
    ACCEPTANCE_LINES = []


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


# ---------------------------------------------------------------------------


def test_criterion_1_structural_identities():
    t0 = time.perf_counter()
    names = ("bracket", "symmetric", "half-bandwidth", "B ")
    failed, n = [], 0
    for kind in (DIRICHLET, NEUMANN):
        rep = verify_structural(3, kind)
        for c in rep.checks:
            if any(k in c.name for k in names):
                n += 1
                if not c.passed:
                    failed.append(c.name)
    dt = time.perf_counter() - t0
    report(1, not failed and n >= 20 and dt < 1.0,
           f"{n} exact identities, {len(failed)} failed, {dt:.2f}s")


def test_criterion_2_ghost_reduction():
    t0 = time.perf_counter()
    a, u1, u2, u3 = F(3, 7), F(-2, 3), F(5, 4), F(1, 9)
    u = [u1, u2, u3, F(0), F(0), F(0)]
    h = F(1, 3)
    sig = BoundarySignal(lambda t: a, lambda t: F(0))
    D = closure_for(DIRICHLET, 1)
    ghost = interior_rhs([0, 0, a, u1, u2, u3, 0], h, F(1), 1)
    ok_d = boundary_rhs(D, u, sig, 0, h, F(1))[0] == ghost
    N = closure_for(NEUMANN, 1)
    diff_n = sum(N.diffusion[1][0][c] * u[c] for c in range(4)) + N.f_d[1][0][0] * a
    # flux difference ((u2 - u1)/h - a/h)/h with a = h u_x
    ok_n = diff_n / h**2 == ((u2 - u1) / h - a / h) / h
    c = F(5, 3)
    fixed = boundary_rhs(D, [c] * 6, BoundarySignal(lambda t: c, lambda t: F(0)), 0, h, F(1))
    signs = resolve_signs()
    ok = ok_d and ok_n and fixed == [0, 0, 0]
    dt = time.perf_counter() - t0
    report(2, ok and dt < 1.0,
           f"Dirichlet ghost {ok_d}, Neumann flux form {ok_n}, uniform fixed point {fixed == [0, 0, 0]}, "
           f"f_c sign {signs.fc}, {dt:.2f}s")


def test_criterion_3_transcription():
    t0 = time.perf_counter()
    D = closure_for(DIRICHLET, 3, coefficients=PRINTED)
    N = closure_for(NEUMANN, 3, coefficients=PRINTED)
    checks = {
        "G1(2,2) = -341/60": N.g_forms[2].matrices[0][1][1] == F(-341, 60),
        "f_d Dirichlet row 1 col 2": sum(D.f_d[k][0][1] for k in D.f_d) == -(F(1, 12) + F(1, 45) + F(1, 112)),
        "f_b Neumann -49/48": N.f_b[0][0] == F(-49, 48),
        "G symmetric": all(
            G is None or all(G[i][j] == G[j][i] for i in range(len(G)) for j in range(len(G)))
            for T in (D, N) for q in T.g_forms.values() for G in q.matrices
        ),
        "G3 rows sum to zero": all(sum(r) == 0 for r in G3),
        "Dirichlet gamma^3 diffusion": D.diffusion[3][0][:4] == (-14, 14, -6, 1),
        "Neumann gamma^2 advection": N.advection[2][1][:4] == (1, 0, -2, 1),
        "Neumann f_c gamma^2 rate": N.f_c[2][1][0][1][3] == F(-757, 48384),
    }
    # the full entry-by-entry transcription lives in test_closures.py
    for name in dir(test_closures):
        if name.startswith("test_") and "printed" in name:
            try:
                getattr(test_closures, name)()
                checks[name] = True
            except AssertionError:
                checks[name] = False
    dt = time.perf_counter() - t0
    bad = [k for k, v in checks.items() if not v]
    report(3, not bad and dt < 5.0, f"{len(checks) - len(bad)}/{len(checks)} groups match"
           + (f"; failed: {bad}" if bad else "") + f", {dt:.2f}s")


def test_criterion_4_interior_consistency():
    hs = [0.4, 0.2, 0.1, 0.05]
    amp = 0.05

    def residuals(p):
        out = []
        for h in hs:
            x = np.arange(-3, 4) * h + 0.3
            exact = -amp * np.sin(0.3) - amp**2 * np.sin(0.3) * np.cos(0.3)
            out.append(abs(interior_rhs(list(amp * np.sin(x)), h, 1.0, p) - exact))
        return out

    o1, o2 = fit_until_floor(hs, residuals(1)), fit_until_floor(hs, residuals(2))
    rng = np.random.default_rng(3)
    exact_pde = all(
        equivalent_pde_rhs(d, 1, F(1, 5)) == d[2] - d[0] * d[1]
        for d in ([F(int(v), 7) for v in rng.integers(-20, 20, 7)] for _ in range(10))
    )
    report(4, o1 >= 1.7 and o2 >= 3.6 and exact_pde,
           f"fitted order p=1 {o1:.2f} (>= 1.7), p=2 {o2:.2f} (>= 3.6), equivalent PDE exact at gamma=1 {exact_pde}")


def test_criterion_5_kink_convergence():
    parts, ok = [], True
    for kind in (DIRICHLET, NEUMANN):
        rep = convergence_study("kink", kind, orders=(1, 2), grids=(16, 32, 64), T=1.0)
        stable = not any(r.blew_up for r in rep.rows)
        interior = rep.orders[1][1] if rep.orders[1] else float("nan")
        e1 = [r.err_global for r in rep.cells(1)]
        e2 = [r.err_global for r in rep.cells(2)]
        better = all(b <= a for a, b in zip(e1, e2))
        ok = ok and stable and interior >= 1.7 and better
        parts.append(f"{kind}: p=1 interior order {interior:.2f}, p=2<=p=1 {better}, stable {stable}")
    report(5, ok, "; ".join(parts))


def _mirror_pair(m=24, p=3, T=1.0):
    k = KinkProblem(x0=-0.8)
    km = k.mirrored()
    h, x1 = k.grid(DIRICHLET, m)
    lo, hi = k.bounds
    hn = h
    # Dirichlet at the left end, Neumann midpoint at the right end, and the mirror image
    xr = x1 + (m - 1) * h + hn / 2
    cfg = DomainConfig(m=m, h=h, x_origin=x1, order=p,
                       left=BoundarySpec(DIRICHLET, k.signal(DIRICHLET, lo, h), "left"),
                       right=BoundarySpec(NEUMANN, k.signal(NEUMANN, xr, h), "right"))
    mx1 = -(x1 + (m - 1) * h)
    mcfg = DomainConfig(m=m, h=h, x_origin=mx1, order=p,
                        left=BoundarySpec(NEUMANN, km.signal(NEUMANN, -xr, h), "left"),
                        right=BoundarySpec(DIRICHLET, km.signal(DIRICHLET, -lo, h), "right"))
    icfg = IntegratorConfig(t1=T)
    a = integrate(assemble(cfg), GridField(k.exact(cfg.x, 0.0), h, x1), icfg)
    b = integrate(assemble(mcfg), GridField(km.exact(mcfg.x, 0.0), h, mx1), icfg)
    return a, b


def test_criterion_6_mirror_symmetry():
    t0 = time.perf_counter()
    worst = 0.0
    a, b = _mirror_pair()
    for (ta, ua), (tb, ub) in zip(a, b):
        assert ta == tb
        u, v = ua.values, ub.values
        worst = max(worst, np.abs(v + u[::-1]).max() / np.abs(u).max())
    dt = time.perf_counter() - t0
    report(6, len(a) == len(b) and worst <= 1e-13 and dt < 10,
           f"max relative mirror defect {worst:.2e} over {len(a)} states (<= 1e-13), {dt:.2f}s")


def test_criterion_7_rate_forcing_activity():
    t0 = time.perf_counter()
    k = KinkProblem()
    m = 15  # h = 8/16 = 0.5
    ok, parts = True, []
    for p in (1, 2, 3):
        cfg, full = run_kink(k, DIRICHLET, m, p, 1.0)
        _, zeroed = run_kink(k, DIRICHLET, m, p, 1.0, rate_terms=False)
        assert cfg.h == 0.5
        exact = k.exact(cfg.x, 1.0)
        e_full = np.abs(full.values - exact).max()
        e_zero = np.abs(zeroed.values - exact).max()
        change = np.abs(full.values - zeroed.values).max()
        # rounding accumulated over the run bounds the floating-point noise
        n = step_plan(assemble(cfg), IntegratorConfig(t1=1.0))[1]
        floor = np.finfo(float).eps * np.abs(exact).max() * n
        ok = ok and change > 10 * floor and e_full <= e_zero
        parts.append(f"p={p}: change {change:.1e} (noise floor {floor:.1e}), error {e_full:.6f} "
                     f"with rate columns vs {e_zero:.6f} zeroed")
    dt = time.perf_counter() - t0
    report(7, ok and dt < 10, "; ".join(parts) + f", {dt:.2f}s")


def test_criterion_8_oracle_cross_validation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    x, t = rng.uniform(-5, 5, 100), rng.uniform(0, 2, 100)
    e = 1e-2
    w1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60
    w2 = np.array([2, -27, 270, -490, 270, -27, 2]) / 180
    ks = np.arange(-3, 4)
    ux = sum(w * kink_solution(x + j * e, t) for j, w in zip(ks, w1)) / e
    uxx = sum(w * kink_solution(x + j * e, t) for j, w in zip(ks, w2)) / e**2
    ut = sum(w * kink_solution(x, t + j * e) for j, w in zip(ks, w1)) / e
    resid = np.abs(ut + kink_solution(x, t) * ux - uxx).max()
    k = KinkProblem()
    errs = {}
    for kind in (DIRICHLET, NEUMANN):
        cfg = k.config(kind, 31 if kind == DIRICHLET else 32, 1)
        assert abs(cfg.h - 0.25) < 1e-15
        lo, hi = k.bounds
        if kind == DIRICHLET:
            bc = lambda xb: (kind, lambda s, xb=xb: float(k.exact(xb, s)))
        else:
            bc = lambda xb: (kind, lambda s, xb=xb: float(kink_derivatives(xb, s)[0]))
        ref = reference_solve(lambda xx: k.exact(xx, 0.0), bc(lo), bc(hi), (lo, hi), cfg.x, 1.0,
                              refinement=16, h_coarse=cfg.h)
        errs[kind] = np.abs(ref - k.exact(cfg.x, 1.0)).max()
    dt = time.perf_counter() - t0
    report(8, resid < 1e-10 and max(errs.values()) < 1e-6 and dt < 30,
           f"kink PDE residual {resid:.1e} (< 1e-10); reference vs exact "
           + ", ".join(f"{kd} {v:.1e}" for kd, v in errs.items()) + f" (< 1e-6), {dt:.2f}s")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted((n, f) for n, f in globals().items() if n.startswith("test_criterion")):
        try:
            fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
