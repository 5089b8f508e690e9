"""Integral functionals: weighted norms, Dirichlet energies, Rayleigh quotients."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateInputError, DomainError, ParameterError, UsageError
from .grid import CylGrid, GridFunction, gradient

__all__ = [
    "Params",
    "QuotientReport",
    "weighted_p_norm",
    "weighted_dirichlet",
    "hardy_quotient",
    "hs_constraint",
    "hs_quotient",
]


@dataclass(frozen=True)
class Params:
    """Problem tuple (N, k, p, alpha, beta, q).

    Hardy mode is active when alpha is set (requires alpha + k > 0);
    Hardy-Sobolev mode when beta is set, and then q is always derived from
    (N, p, beta) via condition (H): q = p (N - beta) / (N - p).
    """

    N: int
    k: int
    p: float
    alpha: Optional[float] = None
    beta: Optional[float] = None
    q: Optional[float] = None

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError("N >= 1 violated")
        if not (1 <= self.k <= self.N):
            raise ParameterError("1 <= k <= N violated")
        if not self.p > 1:
            raise ParameterError("p > 1 violated")
        if self.alpha is None and self.beta is None:
            raise ParameterError("either alpha (Hardy mode) or beta (Hardy-Sobolev mode) required")
        if self.alpha is not None and not (self.alpha + self.k > 0):
            raise ParameterError("alpha + k > 0 violated")
        if self.beta is not None:
            if not self.p < self.N:
                raise ParameterError("p < N violated")
            if not self.beta >= 0:
                raise ParameterError("beta >= 0 violated")
            if not self.beta < self.k:
                raise ParameterError("beta < k violated")
            if not self.beta <= self.p:
                raise ParameterError("beta <= p violated")
            q = self.p * (self.N - self.beta) / (self.N - self.p)
            if self.q is not None and abs(self.q - q) > 1e-12 * max(1.0, q):
                raise ParameterError(
                    f"q = p(N - beta)/(N - p) violated: expected {q}, got {self.q}"
                )
            object.__setattr__(self, "q", q)

    @classmethod
    def hardy(cls, N: int, k: int, p: float, alpha: float) -> "Params":
        return cls(N=N, k=k, p=p, alpha=alpha)

    @classmethod
    def hardy_sobolev(cls, N: int, k: int, p: float, beta: float) -> "Params":
        return cls(N=N, k=k, p=p, beta=beta)

    @property
    def m(self) -> int:
        return self.N - self.k


@dataclass(frozen=True)
class QuotientReport:
    """Numerator, denominator and value of a Rayleigh-type quotient."""

    numerator: float
    denominator: float
    value: float
    grid: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.denominator <= 0:
            raise DegenerateInputError("quotient denominator must be positive")
        if abs(self.value - self.numerator / self.denominator) > 8 * np.finfo(float).eps * abs(self.value):
            raise UsageError("QuotientReport: value != numerator / denominator")

    def to_dict(self) -> dict:
        return {
            "numerator": self.numerator,
            "denominator": self.denominator,
            "value": self.value,
            "grid": self.grid,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _s_dim(u: GridFunction) -> int:
    return u.grid.k if isinstance(u.grid, CylGrid) else u.grid.dim


def _s_weight(u: GridFunction, a: float) -> np.ndarray:
    """Exact cell averages of |y|^a, broadcast over the grid's cells."""
    if a + _s_dim(u) <= 0:
        raise DomainError("weight |y|^a not integrable: a + k <= 0")
    if isinstance(u.grid, CylGrid):
        return u.grid.s_grid.weight_average(a)[:, None]
    return u.grid.weight_average(a)


def weighted_p_norm(u: GridFunction, p: float, a: float) -> float:
    """integral of u^p |y|^a over R^N, reduced to the grid."""
    if p <= 0:
        raise DomainError("exponent p must be positive")
    w = _s_weight(u, a)
    return float(np.sum(u.values**p * w * u.grid.cell_measures))


def weighted_dirichlet(u: GridFunction, p: float, a: float, direction: str = "both") -> float:
    """integral of |grad u|^p |y|^a, with |grad u|^2 = (d_s u)^2 + (d_t u)^2.

    direction="s" (or "t") keeps only one gradient component; by monotonicity
    of the Euclidean norm this never exceeds the full-gradient energy.
    """
    if p <= 0:
        raise DomainError("exponent p must be positive")
    du_s, du_t = gradient(u)
    if direction == "both":
        mag = np.hypot(du_s, du_t)
    elif direction == "s":
        mag = np.abs(du_s)
    elif direction == "t":
        mag = np.abs(du_t)
    else:
        raise UsageError(f"unknown direction {direction!r}")
    w = _s_weight(u, a)
    return float(np.sum(mag**p * w * u.grid.cell_measures))


def hardy_quotient(u: GridFunction, params: Params) -> QuotientReport:
    """Rayleigh quotient int |grad u|^p |y|^(a+p) / int |u|^p |y|^a."""
    if params.alpha is None:
        raise UsageError("hardy_quotient requires Hardy-mode params (alpha set)")
    num = weighted_dirichlet(u, params.p, params.alpha + params.p)
    den = weighted_p_norm(u, params.p, params.alpha)
    if den <= 0:
        raise DegenerateInputError("hardy_quotient: zero denominator")
    return QuotientReport(num, den, num / den, grid=u.grid.descriptor())


def hs_constraint(u: GridFunction, params: Params) -> float:
    """Constraint integral int |u|^q |y|^(-beta) of the minimization problem."""
    if params.beta is None:
        raise UsageError("hs_constraint requires Hardy-Sobolev-mode params (beta set)")
    if params.beta >= _s_dim(u):
        raise DomainError("beta < k violated: weight not integrable on this grid")
    return weighted_p_norm(u, params.q, -params.beta)


def hs_quotient(u: GridFunction, params: Params) -> QuotientReport:
    """Scale-invariant quotient int |grad u|^p / (int |u|^q / |y|^beta)^(p/q)."""
    c = hs_constraint(u, params)
    if c <= 0:
        raise DegenerateInputError("hs_quotient: zero constraint integral")
    num = weighted_dirichlet(u, params.p, 0.0)
    den = c ** (params.p / params.q)
    return QuotientReport(num, den, num / den, grid=u.grid.descriptor(), notes={"constraint": c})
