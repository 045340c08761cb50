"""Command-line entry point: simulate, verify, converge, sample.

Run configurations are flat ``key = value`` files with ``#`` comments::

    m = 31
    h = 0.25
    x_origin = -3.75
    order = 3
    bc_left = dirichlet
    bc_left_signal = exact-kink
    bc_right = neumann
    bc_right_signal = 0.1*sin(2*t + 0.5)
    initial = kink
    t1 = 1
    output = run.csv

Signals are ``c``, ``c*sin(w*t + phi)`` or ``exact-kink``.  A Neumann
signal is the physical gradient ``u_x`` at the boundary midpoint; it is
scaled by ``h`` internally.
"""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from dataclasses import dataclass, fields

import numpy as np

from .assembly import DomainConfig, assemble
from .closures import (
    COEFFICIENT_SETS,
    CORRECTED,
    DEPTH,
    DIRICHLET,
    NEUMANN,
    BoundarySignal,
    BoundarySpec,
    describe_signs,
    resolve_signs,
)
from .integrate import BlowUpError, IntegratorConfig, integrate
from .interior import subgrid_field
from .oracles import PROBLEMS, KinkProblem, coarse_grid_comparison, convergence_study, verify_structural
from .stencil import GridField

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

BC_NAMES = {"dirichlet": DIRICHLET, "neumann": NEUMANN}
PROFILES = ("kink", "sine", "constant")

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_SINE = re.compile(
    rf"^(?:({_NUM})\s*\*\s*)?sin\(\s*({_NUM})\s*\*\s*t\s*(?:([-+])\s*({_NUM}))?\s*\)$"
)


class ConfigError(ValueError):
    pass


def fmt(v) -> str:
    return format(float(v), ".17g")


@dataclass(frozen=True)
class SignalSpec:
    """A boundary signal expression.  ``form`` is ``const``, ``sine`` or ``exact-kink``."""

    form: str
    c: float = 0.0
    omega: float = 0.0
    phi: float = 0.0

    @classmethod
    def parse(cls, text: str) -> SignalSpec:
        s = text.strip()
        if s == "exact-kink":
            return cls("exact-kink")
        if re.fullmatch(_NUM, s):
            return cls("const", float(s))
        mt = _SINE.match(s)
        if mt:
            c = float(mt.group(1)) if mt.group(1) else 1.0
            phi = float(mt.group(4)) if mt.group(4) else 0.0
            if mt.group(3) == "-":
                phi = -phi
            return cls("sine", c, float(mt.group(2)), phi)
        raise ConfigError(f"cannot parse signal {text!r}; expected c, c*sin(w*t+phi) or exact-kink")

    def text(self) -> str:
        if self.form == "exact-kink":
            return "exact-kink"
        if self.form == "const":
            return fmt(self.c)
        return f"{fmt(self.c)}*sin({fmt(self.omega)}*t+{fmt(self.phi)})"


@dataclass(frozen=True)
class RunConfig:
    m: int
    h: float
    t1: float
    x_origin: float = 0.0
    order: int = 3
    gamma: float = 1.0
    bc_left: str = "dirichlet"
    bc_left_signal: SignalSpec = SignalSpec("const")
    bc_right: str = "dirichlet"
    bc_right_signal: SignalSpec = SignalSpec("const")
    initial: str = "constant"
    value: float = 0.0
    amplitude: float = 1.0
    wavenumber: float = 1.0
    phase: float = 0.0
    kink_uL: float = 2.0
    kink_uR: float = 0.0
    kink_x0: float = 0.0
    t0: float = 0.0
    dt: float | str = "auto"
    safety: float = 0.4
    output_every: int = 1
    coefficients: str = CORRECTED
    rate_terms: bool = True
    output: str = ""

    @property
    def kink(self) -> KinkProblem:
        return KinkProblem(self.kink_uL, self.kink_uR, self.kink_x0)

    @property
    def x(self) -> np.ndarray:
        return self.x_origin + self.h * np.arange(self.m)


REQUIRED = ("m", "h", "t1")
_FIELDS = {f.name: f for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    if key in ("m", "order", "output_every"):
        return int(raw)
    if key in ("bc_left_signal", "bc_right_signal"):
        return SignalSpec.parse(raw)
    if key in ("bc_left", "bc_right"):
        if raw not in BC_NAMES:
            raise ConfigError(f"unknown boundary kind {raw!r}; expected one of {sorted(BC_NAMES)}")
        return raw
    if key == "initial":
        if raw not in PROFILES:
            raise ConfigError(f"unknown initial profile {raw!r}; expected one of {PROFILES}")
        return raw
    if key == "coefficients":
        if raw not in COEFFICIENT_SETS:
            raise ConfigError(f"coefficients must be one of {COEFFICIENT_SETS}")
        return raw
    if key == "rate_terms":
        if raw.lower() not in ("true", "false", "1", "0"):
            raise ConfigError(f"rate_terms must be true or false, got {raw!r}")
        return raw.lower() in ("true", "1")
    if key == "dt":
        return "auto" if raw == "auto" else float(raw)
    if key == "output":
        return raw
    return float(raw)


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` text; errors name the offending line."""
    values = {}
    for n, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {n}: expected 'key = value', got {line.strip()!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {n}: {key}: {exc}") from None
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    cfg = RunConfig(**values)
    try:
        domain_config(cfg)
        integrator_config(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for name in _FIELDS:
        v = getattr(cfg, name)
        if isinstance(v, SignalSpec):
            s = v.text()
        elif isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, int) or isinstance(v, str):
            s = str(v)
        else:
            s = fmt(v)
        lines.append(f"{name} = {s}")
    return "\n".join(lines) + "\n"


def _boundary_point(cfg: RunConfig, side: str) -> float:
    kind = BC_NAMES[cfg.bc_left if side == "left" else cfg.bc_right]
    offset = cfg.h if kind == DIRICHLET else cfg.h / 2
    if side == "left":
        return cfg.x_origin - offset
    return cfg.x_origin + (cfg.m - 1) * cfg.h + offset


def make_signal(cfg: RunConfig, side: str) -> BoundarySignal:
    """Closure signal for one end: Dirichlet value, or ``h * u_x`` for Neumann."""
    spec = cfg.bc_left_signal if side == "left" else cfg.bc_right_signal
    kind = BC_NAMES[cfg.bc_left if side == "left" else cfg.bc_right]
    if spec.form == "exact-kink":
        return cfg.kink.signal(kind, _boundary_point(cfg, side), cfg.h)
    if spec.form == "const":
        sig = BoundarySignal.constant(spec.c)
    else:
        sig = BoundarySignal.sine(spec.c, spec.omega, spec.phi)
    return sig.scaled(cfg.h) if kind == NEUMANN else sig


def domain_config(cfg: RunConfig) -> DomainConfig:
    return DomainConfig(
        m=cfg.m, h=cfg.h, x_origin=cfg.x_origin, order=cfg.order, gamma=cfg.gamma,
        rate_terms=cfg.rate_terms, coefficients=cfg.coefficients,
        left=BoundarySpec(BC_NAMES[cfg.bc_left], make_signal(cfg, "left"), "left"),
        right=BoundarySpec(BC_NAMES[cfg.bc_right], make_signal(cfg, "right"), "right"),
    )


def integrator_config(cfg: RunConfig) -> IntegratorConfig:
    return IntegratorConfig(t1=cfg.t1, t0=cfg.t0, dt=cfg.dt, safety=cfg.safety, output_every=cfg.output_every)


def initial_state(cfg: RunConfig) -> np.ndarray:
    x = cfg.x
    if cfg.initial == "kink":
        return cfg.kink.exact(x, cfg.t0)
    if cfg.initial == "sine":
        return cfg.amplitude * np.sin(cfg.wavenumber * x + cfg.phase)
    return np.full(cfg.m, cfg.value, dtype=float)


def simulate(cfg: RunConfig):
    op = assemble(domain_config(cfg))
    u0 = GridField(initial_state(cfg), cfg.h, cfg.x_origin)
    return integrate(op, u0, integrator_config(cfg))


def trajectory_csv(cfg: RunConfig, traj) -> str:
    buf = io.StringIO()
    if NEUMANN in (BC_NAMES[cfg.bc_left], BC_NAMES[cfg.bc_right]):
        buf.write("# neumann signals are physical gradients u_x; the closures use a = h*u_x\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"u_{j}" for j in range(1, cfg.m + 1)])
    for t, u in traj:
        w.writerow([fmt(t)] + [fmt(v) for v in u.values])
    return buf.getvalue()


def _ghosts(cfg: RunConfig, u: np.ndarray, t: float) -> np.ndarray:
    """Two ghost values at each end, consistent with the boundary data."""
    out = np.empty(cfg.m + 4)
    out[2:-2] = u
    for side in ("left", "right"):
        kind = BC_NAMES[cfg.bc_left if side == "left" else cfg.bc_right]
        a = make_signal(cfg, side)(t)[0]
        if side == "left":
            u1, u2 = u[0], u[1]
            if kind == DIRICHLET:
                out[1], out[0] = a, 2 * a - u1
            else:
                out[1], out[0] = u1 - a, u2 - 3 * a
        else:
            um, um1 = u[-1], u[-2]
            if kind == DIRICHLET:
                out[-2], out[-1] = a, 2 * a - um
            else:
                out[-2], out[-1] = um + a, um1 + 3 * a
    return out


def sample_rows(cfg: RunConfig, t: float, u: np.ndarray, r: int):
    """``(element, x, v, approx)`` at ``r`` equispaced points per element.

    Elements within the closure depth of either end are flagged approximate:
    they reuse the interior subgrid formula on ghost-extended windows.
    """
    if r < 1:
        raise ValueError("resolution must be at least 1")
    ext = _ghosts(cfg, u, t)
    xis = [-0.5 + (k + 0.5) / r for k in range(r)]
    rows = []
    for j in range(cfg.m):
        window = ext[j : j + 5]
        approx = int(j < DEPTH or j >= cfg.m - DEPTH)
        xj = cfg.x_origin + j * cfg.h
        for xi in xis:
            v = subgrid_field(window, xi, cfg.h, cfg.gamma)
            rows.append((j + 1, xj + xi * cfg.h, float(v), approx))
    return rows


# ---------------------------------------------------------------------------
# commands


def _read_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cfg = _read_config(args.config)
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return EXIT_OK
    try:
        traj = simulate(cfg)
    except BlowUpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(trajectory_csv(cfg, traj), args.output or cfg.output or None)
    return EXIT_OK


def cmd_verify(args) -> int:
    total, ok = 0, True
    for p in (1, 2, 3):
        rep = verify_structural(p)
        print(rep.text())
        total += len(rep.checks)
        ok = ok and rep.passed
    signs = resolve_signs()
    print(f"identities checked: {total}")
    print(f"resolved sign convention: {describe_signs(signs)}")
    print("result: " + ("all identities pass" if ok else "FAILURES present"))
    return EXIT_OK if ok else 1


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_converge(args) -> int:
    if len(args.grids) < 3:
        print("warning: fewer than three grids, no order will be fitted", file=sys.stderr)
    rep = convergence_study(args.problem, BC_NAMES[args.bc], args.orders, args.grids, args.T,
                            coefficients=args.coefficients)
    _emit(rep.to_csv(), args.output)
    print(rep.summary(), file=sys.stderr)
    if args.compare_fd:
        if args.problem != "kink":
            raise ConfigError("--compare-fd needs the kink problem")
        print(coarse_grid_comparison(BC_NAMES[args.bc], args.grids, args.orders, args.T), file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = _read_config(args.config)
    try:
        traj = simulate(cfg)
    except BlowUpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    k = args.index
    if not -len(traj) <= k < len(traj):
        raise ConfigError(f"time index {k} out of range (trajectory has {len(traj)} rows)")
    t, u = traj[k]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["element", "x", "v", "approx"])
    for j, x, v, approx in sample_rows(cfg, t, u.values, args.resolution):
        w.writerow([j, fmt(x), fmt(v), approx])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holistic-burgers", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="integrate a configured problem, write a CSV trajectory")
    s.add_argument("config")
    s.add_argument("-o", "--output")
    s.add_argument("--dump-config", action="store_true", help="print the normalised config and exit")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run the exact structural identity checks")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("converge", help="grid-refinement study")
    c.add_argument("--problem", choices=sorted(PROBLEMS), default="kink")
    c.add_argument("--bc", choices=sorted(BC_NAMES), default="dirichlet")
    c.add_argument("--orders", type=_int_list, default=[1, 2])
    c.add_argument("--grids", type=_int_list, default=[16, 32, 64])
    c.add_argument("--T", type=float, default=1.0)
    c.add_argument("--coefficients", choices=COEFFICIENT_SETS, default=CORRECTED)
    c.add_argument("--compare-fd", action="store_true",
                   help="also report standard central differences on the same grids")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_converge)

    p = sub.add_parser("sample", help="evaluate the subgrid field inside every element")
    p.add_argument("config")
    p.add_argument("--index", type=int, default=-1, help="trajectory row (default: last)")
    p.add_argument("--resolution", "-r", type=int, default=4)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sample)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
