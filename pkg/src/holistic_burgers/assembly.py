"""Full-domain holistic operator for Burgers' equation on ``m`` grid points."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .closures import (
    CORRECTED,
    DEPTH,
    BoundarySpec,
    ClosureTables,
    boundary_rhs,
    closure_for,
    mirror_closure,
)
from .interior import check_gamma, check_order, interior_rhs_array
from .stencil import BandedMatrix, GridField

MIN_POINTS = 2 * DEPTH + 1

# interior stencil weights by gamma order, centred at offset 0
_INTERIOR_DIFFUSION = {
    1: (Fraction(1), {-1: 1, 0: -2, 1: 1}),
    2: (Fraction(-1, 12), {-2: 1, -1: -4, 0: 6, 1: -4, 2: 1}),
    3: (Fraction(1, 90), {-3: 1, -2: -6, -1: 15, 0: -20, 1: 15, 2: -6, 3: 1}),
}
_INTERIOR_ADVECTION = {
    1: (Fraction(1, 2), {-1: -1, 1: 1}),
    2: (Fraction(-1, 12), {-2: -1, -1: 2, 1: -2, 2: 1}),
}


@dataclass(frozen=True)
class DomainConfig:
    """Grid and boundary description.

    ``x_origin`` is the coordinate of the first grid point ``x_1``.
    """

    m: int
    h: float
    left: BoundarySpec
    right: BoundarySpec
    order: int = 3
    gamma: float = 1.0
    x_origin: float = 0.0
    rate_terms: bool = True
    coefficients: str = CORRECTED

    def __post_init__(self):
        if self.m < MIN_POINTS:
            raise ValueError(f"need at least {MIN_POINTS} grid points, got m={self.m}")
        if not self.h > 0:
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        check_order(self.order)
        check_gamma(self.gamma)

    @property
    def x(self) -> np.ndarray:
        return self.x_origin + self.h * np.arange(self.m)


@dataclass(frozen=True, eq=False)
class HolisticOperator:
    config: DomainConfig
    closure_left: ClosureTables
    closure_right: ClosureTables
    diffusion: BandedMatrix  # exact, unscaled; multiply by 1/h^2
    advection: BandedMatrix  # exact, unscaled; multiply by 1/h
    stabilisation: BandedMatrix  # exact, B / gamma
    _float: dict = field(default_factory=dict, repr=False)

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def h(self) -> float:
        return self.config.h

    def diffusion_float(self) -> BandedMatrix:
        if "diffusion" not in self._float:
            self._float["diffusion"] = self.diffusion.to_float()
        return self._float["diffusion"]


def _stencil_matrix(m, table, top, gamma, left_block, right_block, width):
    entries = {}
    for i in range(DEPTH, m - DEPTH):
        for k, (scale, weights) in table.items():
            if k > top:
                continue
            for off, w in weights.items():
                key = (i, i + off)
                entries[key] = entries.get(key, 0) + scale * gamma**k * w
    for i in range(DEPTH):
        for c, v in enumerate(left_block[i]):
            if v:
                entries[(i, c)] = v
        row = m - DEPTH + i
        rb = right_block[i]
        for c, v in enumerate(rb):
            if v:
                entries[(row, m - len(rb) + c)] = v
    return BandedMatrix._from_entries(m, m, width, width, entries)


def assemble(config: DomainConfig) -> HolisticOperator:
    """Build the operator: left closure, interior stencil, mirrored right closure."""
    p = config.order
    kw = dict(rate_terms=config.rate_terms, coefficients=config.coefficients)
    left = closure_for(config.left.kind, p, **kw)
    right = mirror_closure(closure_for(config.right.kind, p, **kw))
    g = Fraction(config.gamma).limit_denominator(10**12)
    diffusion = _stencil_matrix(
        config.m, _INTERIOR_DIFFUSION, p, g,
        left.diffusion_matrix_block(g), right.diffusion_matrix_block(g), p + 3,
    )
    advection = _stencil_matrix(
        config.m, _INTERIOR_ADVECTION, min(p, 2), g,
        left.advection_matrix_block(g), right.advection_matrix_block(g), p + 3,
    )
    stab_interior = {1: (Fraction(1, 12), {-1: 1, 0: -2, 1: 1})}
    stabilisation = _stencil_matrix(
        config.m, stab_interior, 1, 1,
        left.stabilisation_block(), right.stabilisation_block(), 4,
    )
    return HolisticOperator(config, left, right, diffusion, advection, stabilisation)


def rhs(op: HolisticOperator, u, t) -> np.ndarray:
    """``du/dt`` for the grid values ``u`` (array or :class:`GridField`) at time ``t``."""
    cfg = op.config
    if isinstance(u, GridField):
        u = u.values
    u = np.asarray(u, dtype=float)
    if u.shape != (cfg.m,):
        raise ValueError(f"state has shape {u.shape}, operator expects ({cfg.m},)")
    h, gamma = cfg.h, float(cfg.gamma)
    out = np.empty(cfg.m)
    out[DEPTH : cfg.m - DEPTH] = interior_rhs_array(u, h, gamma, cfg.order)
    w = op.closure_left.width
    out[:DEPTH] = boundary_rhs(op.closure_left, u[:w].tolist(), cfg.left.signal, t, h, gamma)
    out[cfg.m - DEPTH :] = boundary_rhs(
        op.closure_right, u[cfg.m - w :].tolist(), cfg.right.signal, t, h, gamma
    )
    return out


def spectral_bound(op: HolisticOperator, iterations: int = 50, seed: int = 0) -> float:
    """Inflated power-iteration estimate of the spectral radius of ``h^2 D``."""
    A = op.diffusion_float()
    return spectral_bound_matrix(A, iterations, seed)


def spectral_bound_matrix(A: BandedMatrix, iterations: int = 50, seed: int = 0) -> float:
    if not A.diagonals:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.cols)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iterations):
        y = A.matvec(x)
        est = float(np.linalg.norm(y))
        if est == 0.0:
            return 0.0
        x = y / est
    return 1.1 * est
