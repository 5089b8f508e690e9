"""Sharp-constant constructions: the optimal Hardy constant, the plateau /
power-decay test family realizing it, the product family for cylindrical
weights, the two-parameter convexity bound, and the product-domain splitting
demo."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError, DomainError
from .functionals import Params, weighted_dirichlet, weighted_p_norm
from .grid import CylGrid, GridFunction, RadialGrid, make_radial_grid, sphere_area

__all__ = [
    "hardy_constant",
    "eps_family",
    "eps_family_truncated",
    "eps_quotient_closed_form",
    "PowerTail",
    "tail_correction",
    "eps_sweep",
    "convexity_bound",
    "product_family",
    "split_infimum_demo",
    "dirichlet_eigenvalue_interval",
]


def hardy_constant(p: float, alpha: float, k: int) -> float:
    """Optimal constant p^p / (alpha + k)^p of the generalized Hardy inequality.

    The infimum of the corresponding Rayleigh quotient is its reciprocal,
    ((alpha + k) / p)^p.
    """
    if p <= 1:
        raise DomainError("p > 1 violated")
    if alpha + k <= 0:
        raise DomainError("alpha + k > 0 violated")
    return p**p / (alpha + k) ** p


def _decay_exponent(p: float, alpha: float, d: int, eps: float) -> float:
    return (alpha + d) / p + eps


def eps_family(eps: float, params: Params, grid: RadialGrid) -> GridFunction:
    """Plateau / power-decay test function: 1 on r <= 1, r^(-(alpha+N)/p - eps) outside.

    Radial case k = N.  The true function has unbounded support, so grid
    quadrature should be paired with `tail_correction`.
    """
    if eps <= 0:
        raise DomainError("eps > 0 required (decay otherwise non-integrable)")
    if params.k != params.N:
        raise DomainError("eps_family is the radial (k = N) construction")
    if grid.r_max < 1.0:
        raise ConfigurationError("grid must contain the unit plateau (r_max >= 1)")
    g = _decay_exponent(params.p, params.alpha, params.N, eps)
    r = grid.nodes
    values = np.where(r <= 1.0, 1.0, r ** (-g))
    return GridFunction(grid, values)


def eps_family_truncated(eps: float, p: float, alpha: float, grid: RadialGrid) -> GridFunction:
    """Compactly supported variant: the power tail is shifted down to hit 0 at r_max.

    Keeps the gradient of the decay piece unchanged while making the function
    admissible on the truncated domain.
    """
    if eps <= 0:
        raise DomainError("eps > 0 required")
    if grid.r_max <= 1.0:
        raise ConfigurationError("r_max > 1 required")
    g = _decay_exponent(p, alpha, grid.dim, eps)
    c = grid.r_max ** (-g)
    r = grid.nodes
    values = np.clip(np.minimum(1.0, r ** (-g)) - c, 0.0, None)
    return GridFunction(grid, values)


def eps_quotient_closed_form(eps: float, p: float, alpha: float, N: int) -> float:
    """Exact Rayleigh quotient Q(eps) of the plateau / power-decay family.

    Q(eps) = ((alpha+N)/p + eps)^p * (alpha+N) / (alpha+N + p*eps), obtained by
    exact radial integration of the two pieces; Q decreases to ((alpha+N)/p)^p
    as eps -> 0 and is strictly increasing in eps.
    """
    if p <= 1:
        raise DomainError("p > 1 violated")
    if alpha + N <= 0:
        raise DomainError("alpha + N > 0 violated")
    if eps <= 0:
        raise DomainError("eps > 0 required")
    g = (alpha + N) / p + eps
    return g**p * (alpha + N) / (alpha + N + p * eps)


@dataclass(frozen=True)
class PowerTail:
    """Power-law tail amplitude * r^exponent for r beyond a grid's r_max."""

    amplitude: float
    exponent: float


def tail_correction(tail: PowerTail, grid: RadialGrid, p: float, a: float) -> float:
    """Closed-form integral of |tail|^p r^a over (r_max, infinity) in R^dim.

    Added by callers to grid quadrature of functionals of power-decay
    families.  Raises if the remainder integral diverges.
    """
    if tail.amplitude == 0.0:
        return 0.0
    e = p * tail.exponent + a + grid.dim
    if e >= 0:
        raise DomainError(
            f"tail integral diverges (combined exponent {e} >= 0); need faster decay"
        )
    return sphere_area(grid.dim) * abs(tail.amplitude) ** p * grid.r_max**e / (-e)


def default_eps_grid(n: int = 4096, r_max: float = 1e3) -> RadialGrid:
    """Grid tuned for the plateau family: edge exactly at the kink r = 1,
    geometric tail out to r_max."""
    return make_radial_grid(3, r_max, n, "split", r_break=1.0)


def eps_sweep(
    params: Params,
    eps_values: Sequence[float] = (1.0, 0.5, 0.1, 0.05, 0.01, 1e-3),
    grid: Optional[RadialGrid] = None,
    tail: bool = True,
) -> list:
    """Evaluate the Hardy quotient of the plateau family across an eps ladder.

    Returns one row per eps with grid quadrature, analytic tail corrections,
    and the closed-form value for comparison.
    """
    if len(eps_values) == 0:
        raise ConfigurationError("eps ladder must be non-empty")
    if grid is None:
        grid = make_radial_grid(params.N, 1e3, 4096, "split", r_break=1.0)
    if grid.dim != params.N:
        raise ConfigurationError("grid dimension must equal N for the radial family")
    p, alpha = params.p, params.alpha
    rows = []
    for eps in sorted(eps_values, reverse=True):
        u = eps_family(eps, params, grid)
        g = _decay_exponent(p, alpha, params.N, eps)
        num = weighted_dirichlet(u, p, alpha + p)
        den = weighted_p_norm(u, p, alpha)
        tail_num = tail_den = 0.0
        if tail:
            tail_num = tail_correction(PowerTail(g, -g - 1.0), grid, p, alpha + p)
            tail_den = tail_correction(PowerTail(1.0, -g), grid, p, alpha)
        quotient = (num + tail_num) / (den + tail_den)
        closed = eps_quotient_closed_form(eps, p, alpha, params.N)
        rows.append(
            {
                "eps": eps,
                "numerator": num + tail_num,
                "denominator": den + tail_den,
                "quotient": quotient,
                "closed_form": closed,
                "rel_err": abs(quotient - closed) / closed,
                "tail_correction_num": tail_num,
                "tail_correction_den": tail_den,
            }
        )
    return rows


def convexity_bound(s: float, t: float, lam: float, p: float):
    """Two-sided evaluation of (s^2+t^2)^(p/2) <= (1-lam)^(1-p) s^p + lam^(1-p) t^p.

    Returns (lhs, rhs).
    """
    if not (0.0 < lam < 1.0):
        raise DomainError("lambda in (0, 1) violated")
    if p <= 1:
        raise DomainError("p > 1 violated")
    if s < 0 or t < 0:
        raise DomainError("s, t >= 0 violated")
    lhs = (s * s + t * t) ** (p / 2.0)
    rhs = (1.0 - lam) ** (1.0 - p) * s**p + lam ** (1.0 - p) * t**p
    return lhs, rhs


def _support_radius(w: GridFunction) -> float:
    """Outer edge of the last cell where w is nonzero."""
    nz = np.nonzero(w.values)[0]
    if len(nz) == 0:
        return 0.0
    return float(w.grid.edges[nz[-1] + 1])


def product_family(
    v: GridFunction, w: GridFunction, lambda_scale: float, grid: CylGrid
) -> GridFunction:
    """Cylindrical sampling of u(y, z) = v(|y|) * w(|z| / lambda_scale).

    Spreading w (lambda_scale -> infinity) makes the z-contribution to the
    Dirichlet energy vanish relative to its mass, which is how the cylindrical
    sharp constant is approached from above.
    """
    if lambda_scale <= 0:
        raise DomainError("lambda_scale must be positive")
    if grid.m < 1:
        raise DomainError("product family needs m = N - k >= 1")
    if v.grid.n != grid.s_grid.n or v.grid.dim != grid.k:
        raise ConfigurationError("v must live on the cylinder's s-grid")
    support = lambda_scale * _support_radius(w)
    if support > grid.t_grid.r_max:
        raise ConfigurationError(
            f"scaled support {support:g} exceeds t-grid r_max {grid.t_grid.r_max:g}"
        )
    w_scaled = np.interp(grid.t_nodes / lambda_scale, w.grid.nodes, w.values, right=0.0)
    return GridFunction(grid, np.outer(v.values, w_scaled))


def dirichlet_eigenvalue_interval(width: float, n: int = 8192) -> float:
    """First eigenvalue of the 1D second-difference Dirichlet Laplacian on (0, width)."""
    h = width / n
    d = np.full(n - 1, 2.0 / h**2)
    e = np.full(n - 2, -1.0 / h**2)
    vals = eigh_tridiagonal(d, e, select="i", select_range=(0, 0), eigvals_only=True)
    return float(vals[0])


def _default_bump(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 1.0, (1.0 - np.minimum(x * x, 1.0)) ** 2, 0.0)


def split_infimum_demo(
    p: float = 2.0,
    omega_width: float = 1.0,
    lambda_scales: Sequence[float] = (1.0, 4.0, 16.0, 64.0),
    n_omega: int = 512,
    n_t: int = 2048,
) -> dict:
    """Product-domain splitting: the quotient of v(x1) * w(x2 / lambda) on
    Omega x R approaches the Omega-only infimum as lambda grows.

    v is the discrete first Dirichlet eigenfunction on Omega = (0, omega_width),
    w a fixed even bump.  Returns per-lambda quotients plus the discrete
    Omega-only infimum.
    """
    if len(lambda_scales) == 0:
        raise ConfigurationError("lambda ladder must be non-empty")
    if omega_width <= 0:
        raise ConfigurationError("omega_width must be positive")
    h = omega_width / n_omega
    d = np.full(n_omega - 1, 2.0 / h**2)
    e = np.full(n_omega - 2, -1.0 / h**2)
    vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    omega_infimum = float(vals[0])
    v = np.concatenate(([0.0], np.abs(vecs[:, 0]), [0.0]))
    xs = np.linspace(0.0, omega_width, n_omega + 1)

    lam_max = max(lambda_scales)
    ts = np.linspace(0.0, 1.05 * lam_max, n_t + 1)
    rows = []
    for lam in sorted(lambda_scales):
        U = np.outer(v, _default_bump(ts / lam))
        du_x = np.gradient(U, xs, axis=0)
        du_t = np.gradient(U, ts, axis=1)
        mag = np.hypot(du_x, du_t)
        num = float(np.trapezoid(np.trapezoid(mag**p, ts, axis=1), xs))
        den = float(np.trapezoid(np.trapezoid(U**p, ts, axis=1), xs))
        rows.append(
            {
                "lambda": lam,
                "numerator": num,
                "denominator": den,
                "quotient": num / den,
                "omega_infimum": omega_infimum,
            }
        )
    return {"rows": rows, "omega_infimum": omega_infimum}
