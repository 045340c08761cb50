"""Interior holistic discretisation of Burgers' equation ``u_t + u u_x = u_xx``.

The grid values evolve, away from any domain boundary, as

    du_j/dt = [g d2 - g^2/12 d4 + g^3/90 d6] u_j / h^2
              - u_j [g md - g^2/6 md3] u_j / h
              + g^2/(24 h) (d2 u_j * md3 u_j + d4 u_j * md u_j)
              + g/12 u_j^2 d2 u_j

with ``g`` the inter-element coupling and ``d2, d4, d6, md, md3`` the
centred differences of :mod:`holistic_burgers.stencil`.  The truncation order
``p`` keeps diffusion to ``g**p``, advection to ``g**min(p, 2)``, the cubic
stabilisation at order ``g`` and the quadratic interaction at ``g**2``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

ORDERS = (1, 2, 3)


def check_order(order) -> int:
    if order not in ORDERS:
        raise ValueError(f"truncation order must be one of {ORDERS}, got {order!r}")
    return int(order)


def check_gamma(gamma):
    if not 0 <= gamma <= 1:
        raise ValueError(f"coupling gamma must lie in [0, 1], got {gamma!r}")
    return gamma


def _terms(um3, um2, um1, u0, up1, up2, up3, h, gamma, order):
    # shared by the scalar evaluator and the vectorised operator rows, so the
    # operation order (and hence rounding) is identical in both
    d2 = um1 - 2 * u0 + up1
    md = (up1 - um1) / 2
    diff = gamma * d2
    adv = gamma * md
    if order >= 2:
        d4 = um2 - 4 * um1 + 6 * u0 - 4 * up1 + up2
        md3 = (up2 - 2 * up1 + 2 * um1 - um2) / 2
        diff = diff - gamma**2 / 12 * d4
        adv = adv - gamma**2 / 6 * md3
    if order >= 3:
        d6 = um3 - 6 * um2 + 15 * um1 - 20 * u0 + 15 * up1 - 6 * up2 + up3
        diff = diff + gamma**3 / 90 * d6
    out = diff / h**2 - u0 * adv / h
    if order >= 2:
        out = out + gamma**2 / (24 * h) * (d2 * md3 + d4 * md)
    out = out + gamma / 12 * u0**2 * d2
    return out


def interior_rhs(window: Sequence, h, gamma=1, order: int = 3):
    """Time derivative of the centre value of a 7-point window.

    Exact when fed Fractions.  For ``order < 3`` the outer points are not
    used but must still be supplied.
    """
    check_order(order)
    check_gamma(gamma)
    if len(window) != 7:
        raise ValueError(f"interior_rhs needs a 7-point window, got {len(window)}")
    if isinstance(gamma, int):
        gamma = Fraction(gamma)
    return _terms(*window, h, gamma, order)


def interior_rhs_array(u, h, gamma, order):
    """Vectorised :func:`interior_rhs` for every index ``3 .. len(u) - 4``."""
    n = len(u)
    s = [u[k : n - 6 + k] for k in range(7)]
    return _terms(*s, h, gamma, order)


def interaction(u_window: Sequence):
    """``d2 u * md3 u + d4 u * md u`` at the centre of a 5-point window."""
    um2, um1, u0, up1, up2 = u_window
    d2 = um1 - 2 * u0 + up1
    md = (up1 - um1) / 2
    d4 = um2 - 4 * um1 + 6 * u0 - 4 * up1 + up2
    md3 = (up2 - 2 * up1 + 2 * um1 - um2) / 2
    return d2 * md3 + d4 * md


def subgrid_field(window: Sequence, xi, h, gamma=1):
    """Reconstructed field ``v_j`` inside element ``j`` at ``xi = (x - x_j)/h``.

    ``window`` holds ``u_{j-2} .. u_{j+2}``.  ``|xi| <= 3/2`` is accepted so
    the field can be extended into the neighbouring elements.
    """
    if len(window) != 5:
        raise ValueError(f"subgrid_field needs a 5-point window, got {len(window)}")
    if abs(xi) > 1.5:
        raise ValueError(f"xi={xi} outside [-3/2, 3/2]")
    um2, um1, u0, up1, up2 = window
    d2 = um1 - 2 * u0 + up1
    md = (up1 - um1) / 2
    d4 = um2 - 4 * um1 + 6 * u0 - 4 * up1 + up2
    md3 = (up2 - 2 * up1 + 2 * um1 - um2) / 2
    cubic = (xi**3 - xi) / 6
    return (
        u0
        + gamma * (xi * md + xi**2 * d2 / 2)
        + gamma**2 * (cubic * md3 + (xi**4 - xi**2) / 24 * d4)
        + gamma * h * cubic * u0 * d2
    )


def equivalent_pde_rhs(derivs: Sequence, gamma, h):
    """Right-hand side of the equivalent PDE of the interior scheme.

    ``derivs`` is ``(u, u_x, u_xx, u_xxx, u_xxxx, u_5x, u_6x)`` at a point.
    Used as a consistency oracle, not as a scheme.
    """
    if len(derivs) != 7:
        raise ValueError("need u and its first six x-derivatives")
    u, u1, u2, u3, u4, u5, u6 = derivs
    g = gamma
    c = g * (1 - g)
    quartic = 2 * g * (
        -5 * u1**2 * u2 - 9 * u * u2**2 - 25 * u * u1 * u3
        + 15 * u2 * u3 + 15 * u1 * u4 - 2 * u**2 * u4
    ) + (1 - 4 * g) * (2 * u6 - 6 * u * u5 + 5 * u**2 * u4)
    return (
        g * (-u * u1 + u2)
        + h**2 / 12 * c * (u4 - 2 * u * u3 + u**2 * u2)
        + h**4 / 720 * c * quartic
    )
