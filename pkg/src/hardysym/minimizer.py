"""Constrained minimization of the Hardy-Sobolev quotient by projected
gradient descent on cylindrical grid functions, plus the symmetrize-and-compare
experiment and the beta = p endpoint sweep."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConfigurationError, DegenerateInputError, DomainError, UsageError
from .functionals import Params, hs_constraint, hs_quotient, weighted_dirichlet
from .grid import CylGrid, GridFunction, make_radial_grid
from .rearrange import double_star
from .sharp_constant import eps_family_truncated, product_family

__all__ = [
    "DescentOptions",
    "MinimizationTrace",
    "default_init",
    "minimize_hs",
    "symmetrize_and_compare",
    "hardy_endpoint_sweep",
]


@dataclass(frozen=True)
class DescentOptions:
    max_iter: int = 2000
    tol: float = 1e-10
    tau0: float = 1.0
    max_halvings: int = 40
    precondition: bool = True
    delta_scale: float = 1e-8  # p-Laplacian regularization, relative to grid diameter
    seed: int = 0
    track_symmetry_every: int = 50


@dataclass
class MinimizationTrace:
    """Iteration history of the constrained descent."""

    energies: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    quotients: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    symmetry_deviation: list = field(default_factory=list)
    final_u: Optional[GridFunction] = None
    converged: bool = False
    stop_reason: str = ""
    delta_reg: float = 0.0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "energies": self.energies,
            "constraints": self.constraints,
            "quotients": self.quotients,
            "step_sizes": self.step_sizes,
            "symmetry_deviation": self.symmetry_deviation,
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "delta_reg": self.delta_reg,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _StaggeredEnergy:
    """Edge-based discrete Dirichlet p-energy on a cylindrical grid.

    Gradients live on cell edges (forward differences); squared edge
    gradients are averaged onto cells before taking the p/2 power.  Unlike a
    cell-centered scheme, the staggered one has no spurious oscillatory null
    mode, so descent cannot exploit grid-scale checkerboards.  The origin
    edge carries zero gradient (radial symmetry); a wall edge at r_max
    connects the last cell to the Dirichlet zero boundary.

    delta regularizes |grad u|^(p-2) at zero gradient for p != 2.
    """

    def __init__(self, grid: CylGrid, p: float, delta: float):
        self.p = p
        self.delta = delta
        self.W = np.outer(grid.s_grid.cell_measures, grid.t_measures)
        s = grid.s_nodes
        # inverse spacings for edges 1..ns-1 (interior) and ns (wall)
        self.inv_ds = 1.0 / np.concatenate((np.diff(s), [grid.s_grid.r_max - s[-1]]))
        if grid.m >= 1 and grid.shape[1] >= 2:
            t = grid.t_nodes
            self.inv_dt = 1.0 / np.concatenate((np.diff(t), [grid.t_grid.r_max - t[-1]]))
        else:
            self.inv_dt = None

    def _edge_gradients(self, U):
        ns, nt = U.shape
        gs = np.zeros((ns + 1, nt))
        gs[1:ns] = (U[1:] - U[:-1]) * self.inv_ds[:-1, None]
        gs[ns] = -U[-1] * self.inv_ds[-1]
        if self.inv_dt is None:
            gt = np.zeros((ns, nt + 1))
        else:
            gt = np.zeros((ns, nt + 1))
            gt[:, 1:nt] = (U[:, 1:] - U[:, :-1]) * self.inv_dt[None, :-1]
            gt[:, nt] = -U[:, -1] * self.inv_dt[-1]
        return gs, gt

    def _cell_square(self, U):
        gs, gt = self._edge_gradients(U)
        g2 = 0.5 * (gs[:-1] ** 2 + gs[1:] ** 2) + 0.5 * (gt[:, :-1] ** 2 + gt[:, 1:] ** 2)
        return g2, gs, gt

    def value(self, U) -> float:
        g2, _, _ = self._cell_square(U)
        return float(np.sum((g2 + self.delta**2) ** (self.p / 2.0) * self.W))

    def value_and_gradient(self, U):
        g2, gs, gt = self._cell_square(U)
        phi = (g2 + self.delta**2) ** (self.p / 2.0 - 1.0)
        energy = float(np.sum(phi * (g2 + self.delta**2) * self.W))
        psi = 0.5 * self.p * phi * self.W
        ns, nt = U.shape
        # edge coefficients: half the psi of each adjacent cell
        ks = np.zeros_like(gs)
        ks[1:ns] = 0.5 * (psi[:-1] + psi[1:])
        ks[ns] = 0.5 * psi[-1]
        Fs = 2.0 * ks * gs
        Fs[1:] *= self.inv_ds[:, None]
        grad = Fs[:-1] - Fs[1:]
        if self.inv_dt is not None:
            kt = np.zeros_like(gt)
            kt[:, 1:nt] = 0.5 * (psi[:, :-1] + psi[:, 1:])
            kt[:, nt] = 0.5 * psi[:, -1]
            Ft = 2.0 * kt * gt
            Ft[:, 1:] *= self.inv_dt[None, :]
            grad = grad + Ft[:, :-1] - Ft[:, 1:]
        return energy, grad


def default_init(grid: CylGrid, kind: str = "bump", seed: int = 0) -> GridFunction:
    """Centered product bump exp(-s^2 - t^2); "random" adds seeded smooth
    positive perturbations of it."""
    s = grid.s_nodes[:, None]
    t = grid.t_nodes[None, :]
    bump = np.exp(-(s**2) - t**2) * np.ones(grid.shape)
    if kind == "bump":
        values = bump
    elif kind == "random":
        rng = np.random.default_rng(seed)
        pert = np.zeros(grid.shape)
        smax = grid.s_grid.r_max
        tmax = grid.t_grid.r_max if grid.t_grid is not None else 1.0
        for _ in range(4):
            cs = rng.uniform(0.0, 0.4 * smax)
            ct = rng.uniform(0.0, 0.4 * tmax)
            width = rng.uniform(0.5, 1.5)
            amp = rng.uniform(-0.4, 0.4)
            pert += amp * np.exp(-((s - cs) ** 2 + (t - ct) ** 2) / width**2)
        values = bump * np.clip(1.0 + pert, 0.1, None)
    else:
        raise UsageError(f"unknown initializer {kind!r}")
    values = values.copy()
    values[-1, :] = 0.0
    if grid.m >= 1:
        values[:, -1] = 0.0
    return GridFunction(grid, values)


def _project(grid: CylGrid, values: np.ndarray, params: Params) -> tuple:
    """Rescale to constraint value 1 (exact by q-homogeneity)."""
    u = GridFunction(grid, values)
    c = hs_constraint(u, params)
    if c <= 0:
        raise DegenerateInputError("cannot project: constraint integral is zero")
    return GridFunction(grid, values * c ** (-1.0 / params.q)), c


def _stiffness_1d(n: int, inv_d: np.ndarray, measures: np.ndarray) -> sp.csr_matrix:
    """1D edge-difference stiffness with zero-flux origin and Dirichlet wall."""
    rows, cols, data = [], [], []
    for e in range(1, n + 1):
        inv = inv_d[e - 1]
        rows.append(e)
        cols.append(e - 1)
        data.append(-inv)
        if e < n:
            rows.append(e)
            cols.append(e)
            data.append(inv)
    D = sp.csr_matrix((data, (rows, cols)), shape=(n + 1, n))
    we = np.concatenate((np.zeros(1), 0.5 * (measures[:-1] + measures[1:]), [0.5 * measures[-1]]))
    return (D.T @ sp.diags(we) @ D).tocsr()


def _build_preconditioner(grid: CylGrid, energy: _StaggeredEnergy):
    """H1-type preconditioner: staggered stiffness (p = 2 coefficients) + mass.

    Symmetric positive definite thanks to the Dirichlet wall edge, so the
    preconditioned gradient is always a descent direction.
    """
    ns, nt = grid.shape
    ms = grid.s_grid.cell_measures
    mt = grid.t_measures
    As = _stiffness_1d(ns, energy.inv_ds, ms)
    term1 = sp.kron(As, sp.diags(mt))
    if energy.inv_dt is not None:
        At = _stiffness_1d(nt, energy.inv_dt, mt)
        term2 = sp.kron(sp.diags(ms), At)
    else:
        term2 = sp.csr_matrix((ns * nt, ns * nt))
    mass = sp.diags(np.outer(ms, mt).ravel())
    return splu((term1 + term2 + mass).tocsc())


def minimize_hs(
    params: Params,
    grid: CylGrid,
    init: Union[GridFunction, str] = "bump",
    opts: DescentOptions = DescentOptions(),
) -> MinimizationTrace:
    """Projected descent for S = inf { int |grad u|^p : int |u|^q / |y|^beta = 1 }.

    The Dirichlet energy is discretized on staggered edges (see
    _StaggeredEnergy), with the zero boundary at r_max built into the wall
    edges.  Each step moves against the constrained energy gradient
    (preconditioned by an H1 solve by default), re-imposes nonnegativity, and
    rescales back onto the constraint set.  A step is accepted only if the
    quotient does not increase; backtracking halves the step size.
    Convergence is declared on relative quotient stagnation.
    """
    if params.beta is None:
        raise UsageError("minimize_hs requires Hardy-Sobolev-mode params")
    if isinstance(init, str):
        u0 = default_init(grid, init, seed=opts.seed)
    else:
        u0 = init
    if not np.any(u0.values > 0):
        raise DegenerateInputError("all-zero initializer")

    p, q, beta = params.p, params.q, params.beta
    ms = grid.s_grid.cell_measures
    mt = grid.t_measures
    Wbeta = np.outer(grid.s_grid.weight_average(-beta) * ms, mt)

    diam = math.hypot(grid.s_grid.r_max, grid.t_grid.r_max if grid.t_grid else 0.0)
    delta = opts.delta_scale * diam if p != 2.0 else 0.0
    energy_fn = _StaggeredEnergy(grid, p, delta)

    lu = _build_preconditioner(grid, energy_fn) if opts.precondition else None

    trace = MinimizationTrace(delta_reg=delta, meta={"grid": grid.descriptor(), "seed": opts.seed})

    def evaluate(values):
        u, _ = _project(grid, values, params)
        c = hs_constraint(u, params)
        e = energy_fn.value(u.values)
        return u, c, e, e / c ** (p / q)

    u, constraint, energy, quotient = evaluate(np.clip(u0.values, 0.0, None))

    def record(e, c, q_val, tau):
        trace.energies.append(e)
        trace.constraints.append(c)
        trace.quotients.append(q_val)
        trace.step_sizes.append(tau)

    record(energy, constraint, quotient, 0.0)

    tau = opts.tau0
    for it in range(opts.max_iter):
        U = u.values
        energy, grad_e = energy_fn.value_and_gradient(U)
        theta = p * energy / (q * constraint)
        grad_c = q * U ** (q - 1.0) * Wbeta
        direction = grad_e - theta * grad_c
        if lu is not None:
            direction = lu.solve(direction.ravel()).reshape(U.shape)
        dir_scale = np.max(np.abs(direction))
        if dir_scale == 0.0 or not np.isfinite(dir_scale):
            trace.converged = True
            trace.stop_reason = "zero_gradient"
            break

        tau = min(2.0 * tau, 1e6)
        accepted = False
        for _ in range(opts.max_halvings + 1):
            cand = np.clip(U - tau * direction, 0.0, None)
            if not np.any(cand > 0):
                tau *= 0.5
                continue
            u_new, c_new, e_new, q_new = evaluate(cand)
            if q_new <= quotient:
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            # cannot decrease along this direction: stationary up to line-search floor
            trace.converged = True
            trace.stop_reason = "step_rejected_at_stationarity"
            break

        rel_change = abs(quotient - q_new) / max(quotient, 1e-300)
        u, constraint, energy, quotient = u_new, c_new, e_new, q_new
        record(energy, constraint, quotient, tau)
        if opts.track_symmetry_every and (it % opts.track_symmetry_every == 0):
            dev = np.max(np.abs(double_star(u).values - u.values)) / max(u.values.max(), 1e-300)
            trace.symmetry_deviation.append({"iter": it, "deviation": float(dev)})
        if rel_change < opts.tol:
            trace.converged = True
            trace.stop_reason = "quotient_stagnation"
            break
    else:
        trace.stop_reason = "max_iter"
        # monotone trace throughout; flag convergence if the tail is flat
        if len(trace.quotients) >= 2:
            tail = abs(trace.quotients[-2] - trace.quotients[-1]) / trace.quotients[-1]
            trace.converged = tail < math.sqrt(opts.tol)

    trace.final_u = u
    return trace


def symmetrize_and_compare(u: GridFunction, params: Params) -> dict:
    """Apply the double symmetrization and report quotients before and after.

    Both functions are renormalized to constraint value 1; the quotient is
    scale-invariant so the comparison is unaffected.  After-symmetrization
    quotients never exceed the original beyond a refinement-shrinking slack.
    """
    c_before = hs_constraint(u, params)
    if c_before <= 0:
        raise DegenerateInputError("zero constraint integral")
    before = hs_quotient(u, params)
    u_sym = double_star(u)
    c_after = hs_constraint(u_sym, params)
    after = hs_quotient(u_sym, params)
    return {
        "quotient_before": before.value,
        "quotient_after": after.value,
        "energy_before": before.numerator,
        "energy_after": after.numerator,
        "constraint_before": c_before,
        "constraint_after": c_after,
    }


def hardy_endpoint_sweep(
    params: Params,
    ladder: Optional[Sequence] = None,
    *,
    n_s: int = 4096,
    n_t: int = 512,
    log_r_max: float = 100.0,
    first_width: float = 1e-3,
    n_w: int = 1024,
) -> list:
    """Quotient ladder at the Hardy endpoint beta = p (so q = p).

    Along the product family (truncated plateau family in y, spreading bump
    in z) the quotient decreases monotonically toward ((k - p)/p)^p.  The
    plateau family needs exponentially many e-folds in eps, so the y-grid is
    geometric out to r_max = exp(log_r_max) and the spreading scales are
    proportional to r_max.
    """
    if params.beta is None or abs(params.beta - params.p) > 1e-12:
        raise DomainError("endpoint sweep requires beta = p (so q = p)")
    if params.p >= params.k:
        raise DomainError("p < k required: the endpoint constant degenerates otherwise")
    k, m, p = params.k, params.m, params.p
    if m < 1:
        raise DomainError("endpoint sweep needs m = N - k >= 1")
    R = math.exp(log_r_max)
    target = ((k - p) / p) ** p

    s_grid = make_radial_grid(k, R, n_s, "geometric", first_width=first_width)
    if ladder is None:
        ladder = [
            (0.1, R / 16.0),
            (0.03, R / 8.0),
            (0.01, R / 4.0),
            (0.003, R / 2.0),
            (0.001, R),
        ]
    if len(ladder) == 0:
        raise ConfigurationError("ladder must be non-empty")
    lam_max = max(lam for _, lam in ladder)
    t_grid = make_radial_grid(m, 1.05 * lam_max, n_t, "uniform")
    grid = CylGrid(s_grid, t_grid)

    w_grid = make_radial_grid(m, 1.0, n_w, "uniform")
    x = w_grid.nodes
    w = GridFunction(w_grid, (1.0 - np.minimum(x * x, 1.0)) ** 2)

    rows = []
    for eps, lam in ladder:
        v = eps_family_truncated(eps, p, -p, s_grid)
        u = product_family(v, w, lam, grid)
        rep = hs_quotient(u, params)
        rows.append(
            {
                "eps": eps,
                "lambda": lam,
                "numerator": rep.numerator,
                "denominator": rep.denominator,
                "quotient": rep.value,
                "target": target,
                "rel_gap": (rep.value - target) / target,
            }
        )
    return rows
