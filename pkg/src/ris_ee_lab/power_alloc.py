"""Optimal per-user powers for a fixed RIS state.

The outer loop is Dinkelbach's method on the ratio
    lambda = sum_k log2(1 + p_k/sigma2) / (P1 + sum_k p_k t_k / nu),
the inner parametric problem has a closed-form water-filling solution:
    zeta solves  sum_k max(zeta - t_k sigma2, t_k p_min) = Pmax,
    xi = min(zeta, nu/(lambda ln 2)),
    p_k = max((xi - t_k sigma2)/t_k, p_min).
zeta is computed exactly by sorting the K breakpoints and solving the active
linear segment, so no inner tolerance is stacked on top of the outer one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import Infeasible
from .model import LN2, PowerAllocation

__all__ = ["AllocProblem", "alloc_problem", "solve_zeta", "inner_solution", "dinkelbach"]


@dataclass(frozen=True)
class AllocProblem:
    """Data of the fixed-RIS power allocation problem.

    The budget check sum(t * p_min) <= Pmax is performed by the solvers, which
    raise Infeasible, so that infeasible problem statements can still be
    constructed and reported on.
    """

    t: np.ndarray
    sigma2: float
    p_min: float
    Pmax: float
    P1_const: float
    nu: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        if self.t.ndim != 1 or self.t.size == 0:
            raise ValueError("t must hold at least one user coefficient")
        if np.any(self.t <= 0):
            raise ValueError("all t_k must be strictly positive")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be strictly positive")
        if self.p_min < 0:
            raise ValueError("p_min must be nonnegative")
        if self.Pmax <= 0:
            raise ValueError("Pmax must be strictly positive")
        if self.P1_const <= 0:
            raise ValueError("P1_const must be strictly positive")
        if not 0 < self.nu <= 1:
            raise ValueError("nu must lie in (0, 1]")

    @property
    def K(self) -> int:
        return self.t.size

    @property
    def floor_power(self) -> float:
        """Transmit power spent when every user sits at the floor."""
        return float(self.t.sum() * self.p_min)


def alloc_problem(cfg: SystemConfig, t: np.ndarray, on_count: int) -> AllocProblem:
    """Convenience constructor binding scenario constants to a RIS state."""
    return AllocProblem(
        t=t,
        sigma2=cfg.sigma2,
        p_min=cfg.p_min,
        Pmax=cfg.Pmax,
        P1_const=cfg.P_static + cfg.P0 * on_count,
        nu=cfg.nu,
    )


def solve_zeta(prob: AllocProblem) -> float:
    """Exact root of s(z) = sum_k max(z - t_k sigma2, t_k p_min) - Pmax.

    s is piecewise linear and nondecreasing with breakpoints
    z_k = t_k (sigma2 + p_min); the active segment is solved in closed form.
    """
    floor = prob.floor_power
    if floor > prob.Pmax:
        raise Infeasible(
            f"floor power {floor:.6g} W exceeds the budget {prob.Pmax:.6g} W"
        )
    breakpoints = prob.t * (prob.sigma2 + prob.p_min)
    order = np.argsort(breakpoints)
    z_sorted = breakpoints[order]
    t_sorted = prob.t[order]
    if floor == prob.Pmax:
        return float(z_sorted[0])
    # with j users above their breakpoint: j*z - sum_{i<=j} t_i sigma2
    #                                      + sum_{i>j} t_i p_min = Pmax
    t_sig_prefix = np.cumsum(t_sorted * prob.sigma2)
    t_floor_suffix = np.concatenate([np.cumsum((t_sorted * prob.p_min)[::-1])[::-1], [0.0]])
    k = prob.K
    for j in range(1, k + 1):
        z = (prob.Pmax - t_floor_suffix[j] + t_sig_prefix[j - 1]) / j
        lo = z_sorted[j - 1]
        hi = z_sorted[j] if j < k else np.inf
        tol = 1e-12 * max(1.0, abs(lo))
        if z >= lo - tol and z <= hi + tol:
            return float(z)
    # unreachable for consistent inputs; fall back to the last segment
    return float((prob.Pmax - 0.0 + t_sig_prefix[-1]) / k)


def inner_solution(prob: AllocProblem, lam: float) -> np.ndarray:
    """Unique maximizer of sum log2(1 + p/sigma2) - lam*(P1 + sum p t / nu)
    subject to the budget and the per-user floor."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    zeta = solve_zeta(prob)
    xi = zeta if lam == 0 else min(zeta, prob.nu / (lam * LN2))
    return np.maximum((xi - prob.t * prob.sigma2) / prob.t, prob.p_min)


def dinkelbach(prob: AllocProblem, tol: float = 1e-9, max_iters: int = 50) -> PowerAllocation:
    """Iterate the parametric inner problem until the ratio stops improving.

    Starts from lambda = 0 (pure rate maximization, always feasible); the
    returned lambda_trace is nondecreasing and the final ratio is exact for
    the returned allocation, so EE = BW * lambda_trace[-1].
    """
    lam = 0.0
    trace: list[float] = []
    p = inner_solution(prob, lam)
    for _ in range(max_iters):
        p = inner_solution(prob, lam)
        num = float(np.log2(1.0 + p / prob.sigma2).sum())
        den = prob.P1_const + float(p @ prob.t) / prob.nu
        lam_new = num / den
        trace.append(lam_new)
        if lam_new - lam < tol:
            break
        lam = lam_new
    return PowerAllocation(p=p, lambda_trace=trace, iterations=len(trace))
