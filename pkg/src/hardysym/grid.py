"""Weighted radial and cylindrical grids.

Everything downstream reduces N-dimensional integrals with power weights in
|y| to low-dimensional sums over these grids.  Cell measures are computed by
exact integration of r^(d-1) over each cell, so singular-but-integrable
weights near the origin carry no quadrature penalty.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError, UsageError

__all__ = [
    "sphere_area",
    "RadialGrid",
    "CylGrid",
    "GridFunction",
    "make_radial_grid",
    "radial_grid_from_edges",
    "integrate",
    "gradient",
    "grid_function_to_csv",
]


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d: 2 pi^(d/2) / Gamma(d/2)."""
    if d < 1:
        raise DomainError("sphere_area: dimension d >= 1 required")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _power_integral(edges: np.ndarray, e: float) -> np.ndarray:
    """Exact per-cell integral of r^e dr.

    Requires e > -1 whenever the first edge is 0 (integrability at the origin).
    """
    if edges[0] == 0.0 and e <= -1.0:
        raise DomainError(f"integral of r^{e} not integrable at r = 0")
    if e == -1.0:
        return np.log(edges[1:] / edges[:-1])
    powers = edges ** (e + 1.0)
    return np.diff(powers) / (e + 1.0)


@dataclass(frozen=True)
class RadialGrid:
    """1D radial discretization of R^dim reduced to the radius.

    cell_measures[i] = sigma(dim) * integral of r^(dim-1) over cell i, so the
    sum of measures is the volume of the ball of radius r_max.
    """

    dim: int
    edges: np.ndarray
    nodes: np.ndarray
    cell_measures: np.ndarray
    grading: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.edges, self.nodes, self.cell_measures):
            arr.setflags(write=False)
        if self.dim < 1:
            raise DomainError("RadialGrid: dim >= 1 required")
        if not np.all(np.diff(self.edges) > 0):
            raise ConfigurationError("RadialGrid: edges must be strictly increasing")
        if not np.all(np.diff(self.nodes) > 0):
            raise ConfigurationError("RadialGrid: nodes must be strictly increasing")
        if np.any(self.nodes <= self.edges[:-1]) or np.any(self.nodes >= self.edges[1:]):
            raise ConfigurationError("RadialGrid: each node must lie inside its cell")
        if np.any(self.cell_measures <= 0):
            raise ConfigurationError("RadialGrid: all cell measures must be positive")

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def r_max(self) -> float:
        return float(self.edges[-1])

    def power_integral(self, e: float) -> np.ndarray:
        """Exact per-cell integral of r^e dr (closed form)."""
        return _power_integral(self.edges, e)

    def weight_average(self, a: float) -> np.ndarray:
        """Exact cell average of r^a against the cell's r^(dim-1) measure.

        Requires a + dim > 0 so the weight is integrable in the origin cell.
        """
        if a == 0.0:
            return np.ones(self.n)
        if a + self.dim <= 0.0:
            raise DomainError(f"weight r^{a} not cell-integrable: a + dim <= 0")
        return self.power_integral(a + self.dim - 1) / self.power_integral(self.dim - 1)

    def descriptor(self) -> dict:
        return {
            "kind": "radial",
            "d": self.dim,
            "r_max": self.r_max,
            "n": self.n,
            "grading": dict(self.grading),
        }


def radial_grid_from_edges(d: int, edges, grading: Optional[dict] = None) -> RadialGrid:
    """Build a RadialGrid from explicit cell edges (edges[0] must be 0)."""
    edges = np.asarray(edges, dtype=float)
    if edges[0] != 0.0:
        raise ConfigurationError("radial grid edges must start at 0")
    if len(edges) < 2:
        raise ConfigurationError("need at least one cell")
    nodes = 0.5 * (edges[:-1] + edges[1:])
    # np.diff of rounded powers keeps measure additivity exact under cell merging
    measures = sphere_area(d) / d * np.diff(edges ** d)
    return RadialGrid(d, edges, nodes, measures, grading or {"kind": "explicit"})


def _geometric_widths(length: float, n: int, ln_ratio: float) -> np.ndarray:
    """Cell widths in geometric progression (ratio = exp(ln_ratio)) summing to length."""
    if abs(ln_ratio) < 1e-14:
        return np.full(n, length / n)
    x = np.arange(n) * ln_ratio
    w = np.exp(x - x.max())
    return w * (length / w.sum())


def _solve_ln_ratio(length: float, n: int, first_width: float) -> float:
    """ln(ratio) such that geometric widths starting at first_width span length."""
    if first_width <= 0:
        raise ConfigurationError(f"first_width must be positive, got {first_width}")
    if first_width * n == length:
        return 0.0

    j = np.arange(n)

    def f(x):
        if abs(x) < 1e-14:
            return first_width * n - length
        if (n - 1) * x > 700.0:  # sum would overflow; certainly larger than length
            return math.inf
        return first_width * float(np.sum(np.exp(j * x))) - length

    # f is monotone increasing in x; bracket then bisect
    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2
        if lo < -200:
            raise ConfigurationError("geometric grading: cannot bracket ratio")
    while f(hi) < 0:
        hi *= 2
        if hi > 200:
            raise ConfigurationError("geometric grading: cannot bracket ratio")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def make_radial_grid(
    d: int,
    r_max: float,
    n: int,
    grading: str = "uniform",
    *,
    ratio: Optional[float] = None,
    r_break: Optional[float] = None,
    first_width: Optional[float] = None,
) -> RadialGrid:
    """Construct a radial grid on [0, r_max].

    grading:
      - "uniform": equal cell widths.
      - "geometric": widths in geometric progression (dense near 0 for
        ratio > 1).  Give either `ratio` (successive width ratio) or
        `first_width` (width of the origin cell; the ratio is solved for).
      - "split": uniform cells on [0, r_break] (half the cell budget), then a
        width-continuous geometric tail up to r_max.  A cell edge lands
        exactly on r_break.
      - "equimeasure": edges r_max * (i/n)^(1/d), all cell measures equal.
    """
    if r_max <= 0:
        raise ConfigurationError("r_max must be positive")
    if n < 1:
        raise ConfigurationError("need at least one cell")

    if grading == "uniform":
        edges = np.linspace(0.0, r_max, n + 1)
        desc = {"kind": "uniform"}
    elif grading == "geometric":
        if ratio is not None:
            if ratio <= 0:
                raise ConfigurationError("geometric grading: ratio must be positive")
            ln_ratio = math.log(ratio)
        elif first_width is not None:
            ln_ratio = _solve_ln_ratio(r_max, n, first_width)
        else:
            raise ConfigurationError("geometric grading needs ratio or first_width")
        widths = _geometric_widths(r_max, n, ln_ratio)
        edges = np.concatenate(([0.0], np.cumsum(widths)))
        edges[-1] = r_max
        desc = {"kind": "geometric", "ratio": math.exp(ln_ratio)}
    elif grading == "split":
        if r_break is None or not (0.0 < r_break < r_max):
            raise ConfigurationError("split grading: r_break must satisfy 0 < r_break < r_max")
        n1 = max(1, n // 2)
        n2 = n - n1
        if n2 < 1:
            raise ConfigurationError("split grading: need at least 2 cells")
        inner = np.linspace(0.0, r_break, n1 + 1)
        w0 = r_break / n1
        ln_ratio = _solve_ln_ratio(r_max - r_break, n2, w0)
        widths = _geometric_widths(r_max - r_break, n2, ln_ratio)
        # keep widths continuous across the break even after normalization
        outer_edges = r_break + np.cumsum(widths)
        outer_edges[-1] = r_max
        edges = np.concatenate((inner, outer_edges))
        desc = {"kind": "split", "r_break": r_break}
    elif grading == "equimeasure":
        edges = r_max * (np.arange(n + 1) / n) ** (1.0 / d)
        desc = {"kind": "equimeasure"}
    else:
        raise ConfigurationError(f"unknown grading kind: {grading!r}")

    return radial_grid_from_edges(d, edges, desc)


_DEGENERATE_T = "degenerate"


@dataclass(frozen=True)
class CylGrid:
    """Product grid for (|y|, |z|) with x = (y, z) in R^k x R^m, m = N - k.

    The degenerate case m = 0 (k = N) is represented by a single t-cell of
    measure 1, so downstream code is dimension-agnostic.
    """

    s_grid: RadialGrid
    t_grid: Optional[RadialGrid] = None

    def __post_init__(self):
        if self.t_grid is not None and self.t_grid.dim < 1:
            raise DomainError("CylGrid: t_grid dimension must be >= 1")

    @property
    def k(self) -> int:
        return self.s_grid.dim

    @property
    def m(self) -> int:
        return 0 if self.t_grid is None else self.t_grid.dim

    @property
    def N(self) -> int:
        return self.k + self.m

    @property
    def s_nodes(self) -> np.ndarray:
        return self.s_grid.nodes

    @property
    def t_nodes(self) -> np.ndarray:
        if self.t_grid is None:
            return np.array([0.0])
        return self.t_grid.nodes

    @property
    def t_measures(self) -> np.ndarray:
        if self.t_grid is None:
            return np.array([1.0])
        return self.t_grid.cell_measures

    @property
    def shape(self) -> tuple:
        return (self.s_grid.n, len(self.t_nodes))

    @property
    def cell_measures(self) -> np.ndarray:
        return np.outer(self.s_grid.cell_measures, self.t_measures)

    def descriptor(self) -> dict:
        return {
            "kind": "cyl",
            "k": self.k,
            "m": self.m,
            "s": self.s_grid.descriptor(),
            "t": None if self.t_grid is None else self.t_grid.descriptor(),
        }


@dataclass(frozen=True)
class GridFunction:
    """Nonnegative cell values of a function of (|y|, |z|) on a grid."""

    grid: object  # RadialGrid | CylGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        expected = self.grid.shape if isinstance(self.grid, CylGrid) else (self.grid.n,)
        if values.shape != expected:
            raise UsageError(f"values shape {values.shape} does not match grid {expected}")
        if not np.all(np.isfinite(values)):
            raise DomainError("grid function values must be finite")
        if np.any(values < 0):
            raise DomainError("grid function values must be nonnegative")
        values.setflags(write=False)

    @property
    def is_cylindrical(self) -> bool:
        return isinstance(self.grid, CylGrid)

    def scaled(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, c * self.values)


def integrate(grid, cell_values) -> float:
    """Sum of cell_values * cell_measures over the grid."""
    cell_values = np.asarray(cell_values, dtype=float)
    measures = grid.cell_measures
    if cell_values.shape != measures.shape:
        raise UsageError(
            f"cell_values shape {cell_values.shape} does not match grid {measures.shape}"
        )
    return float(np.sum(cell_values * measures))


def _diff_along(values: np.ndarray, nodes: np.ndarray, axis: int) -> np.ndarray:
    """Centered differences at interior nodes, one-sided at the two ends."""
    if values.ndim == 1:
        return _diff_along(values[:, None], nodes, 0).reshape(values.shape)
    v = np.moveaxis(values, axis, 0)
    r = nodes
    out = np.empty_like(v, dtype=float)
    out[1:-1] = (v[2:] - v[:-2]) / (r[2:] - r[:-2])[:, None]
    out[0] = (v[1] - v[0]) / (r[1] - r[0])
    out[-1] = (v[-1] - v[-2]) / (r[-1] - r[-2])
    out = np.moveaxis(out, 0, axis)
    return out.reshape(values.shape)


def gradient(u: GridFunction) -> tuple:
    """Per-cell gradient components (d/ds, d/dt) of a grid function.

    Differences are centered at interior nodes and one-sided at the ends;
    radial symmetry makes the zero-derivative origin condition automatic for
    smooth data, and the test class vanishes at the truncation boundary.
    The degenerate t-direction (m = 0) has zero derivative by construction.
    """
    if isinstance(u.grid, CylGrid):
        grid = u.grid
        if grid.s_grid.n < 2:
            raise UsageError("gradient needs at least 2 cells in the s-direction")
        du_s = _diff_along(u.values, grid.s_nodes, axis=0)
        if grid.m == 0:
            du_t = np.zeros_like(u.values)
        else:
            if grid.t_grid.n < 2:
                raise UsageError("gradient needs at least 2 cells in the t-direction")
            du_t = _diff_along(u.values, grid.t_nodes, axis=1)
        return du_s, du_t
    grid = u.grid
    if grid.n < 2:
        raise UsageError("gradient needs at least 2 cells")
    return _diff_along(u.values, grid.nodes, axis=0), np.zeros_like(u.values)


def grid_function_to_csv(u: GridFunction, path) -> None:
    """Export a grid function as rows (s, t, value, cell_measure)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "t", "value", "cell_measure"])
        if isinstance(u.grid, CylGrid):
            s_nodes, t_nodes = u.grid.s_nodes, u.grid.t_nodes
            measures = u.grid.cell_measures
            for i, s in enumerate(s_nodes):
                for j, t in enumerate(t_nodes):
                    writer.writerow(
                        [f"{s:.17g}", f"{t:.17g}", f"{u.values[i, j]:.17g}", f"{measures[i, j]:.17g}"]
                    )
        else:
            for i, s in enumerate(u.grid.nodes):
                writer.writerow(
                    [f"{s:.17g}", "0", f"{u.values[i]:.17g}", f"{u.grid.cell_measures[i]:.17g}"]
                )
