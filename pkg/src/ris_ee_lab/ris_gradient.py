"""Binary RIS optimization by gradient-ordered coordinate flips.

The objective being minimized for a fixed allocation p is
    g(q) = -P0/2 * sum_n q_n + sum_k p_k t_k(q),
i.e. the controllable part of the consumed power (switching cost plus transmit
power, up to the constant N*P0/2). Each epoch sorts elements by q_n * dg/dq_n
descending, tentatively flips the top round(rho*N) of them in that order, and
keeps a flip only if the result stays within the transmit budget and strictly
decreases g; the search stops once an epoch keeps fewer than eps flips.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import NoFeasibleStart, SingularChannel
from .model import (
    BUDGET_TOL,
    ChannelRealization,
    RisConfig,
    effective_channel,
    gram_inverse,
    t_coefficients,
)

__all__ = ["GradSearchParams", "objective_g", "gradient_g", "search_max_gradient", "feasible_start"]


@dataclass(frozen=True)
class GradSearchParams:
    rho: float = 0.2          # fraction of elements tentatively flipped per epoch
    eps: int = 1              # stop when an epoch keeps fewer than this many flips
    max_epochs: int = 50
    restarts: int = 10        # seeded random starts tried when no start is given
    init_seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if self.eps < 1:
            raise ValueError("eps must be a positive integer")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")


def _as_q(q) -> np.ndarray:
    vec = q.q if isinstance(q, RisConfig) else q
    return np.asarray(vec, dtype=float)


def objective_g(cfg: SystemConfig, chan: ChannelRealization, p, q) -> float:
    """-P0/2 * 1^T q + sum_k p_k t_k(q); raises SingularChannel off the feasible set."""
    qv = _as_q(q)
    p = np.asarray(p, dtype=float)
    t = t_coefficients(effective_channel(chan, qv))
    return -0.5 * cfg.P0 * float(qv.sum()) + float(p @ t)


def gradient_g(cfg: SystemConfig, chan: ChannelRealization, p, q) -> np.ndarray:
    """Analytic gradient of objective_g with respect to the (relaxed) phase vector.

    Component n is -P0/2 - 2 sum_k p_k Re(conj(U_nk) V_nk) with U = F A and
    V = G H A, A = (H^H H)^{-1}; one factorization is shared by all components.
    """
    qv = _as_q(q)
    p = np.asarray(p, dtype=float)
    Hh = effective_channel(chan, qv)
    A = gram_inverse(Hh)
    U = chan.F @ A
    V = chan.G @ (Hh.conj().T @ A)
    channel_term = 2.0 * (np.real(np.conj(U) * V) @ p)
    return -0.5 * cfg.P0 - channel_term


def _tx_power(chan: ChannelRealization, p: np.ndarray, q: np.ndarray) -> float:
    return float(p @ t_coefficients(effective_channel(chan, q)))


def _is_feasible(cfg: SystemConfig, chan: ChannelRealization, p: np.ndarray, q: np.ndarray) -> bool:
    try:
        return _tx_power(chan, p, q) <= cfg.Pmax + BUDGET_TOL
    except SingularChannel:
        return False


def feasible_start(
    cfg: SystemConfig,
    chan: ChannelRealization,
    p: np.ndarray,
    restarts: int = 10,
    seed: int = 0,
) -> np.ndarray:
    """Best feasible state by g among all-+1, all--1 and seeded random draws."""
    candidates = [np.ones(chan.N), -np.ones(chan.N)]
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(17,)))
    candidates.extend(rng.choice([-1.0, 1.0], size=chan.N) for _ in range(restarts))
    best_q, best_g = None, np.inf
    for q in candidates:
        if not _is_feasible(cfg, chan, p, q):
            continue
        g = objective_g(cfg, chan, p, q)
        if g < best_g:
            best_q, best_g = q, g
    if best_q is None:
        raise NoFeasibleStart("no candidate start satisfies the transmit budget")
    return best_q


def search_max_gradient(
    cfg: SystemConfig,
    chan: ChannelRealization,
    p,
    q0=None,
    params: GradSearchParams | None = None,
) -> RisConfig:
    """Epoch loop of gradient-ordered tentative flips; output is feasible with g <= g(start)."""
    params = params or GradSearchParams()
    p = np.asarray(p, dtype=float)
    if q0 is not None:
        q = _as_q(q0)
        if not _is_feasible(cfg, chan, p, q):
            q = feasible_start(cfg, chan, p, params.restarts, params.init_seed)
    else:
        q = feasible_start(cfg, chan, p, params.restarts, params.init_seed)
    q = q.copy()
    g = objective_g(cfg, chan, p, q)
    n_flip = int(round(params.rho * chan.N))
    for _epoch in range(params.max_epochs):
        grad = gradient_g(cfg, chan, p, q)
        order = np.argsort(-(q * grad), kind="stable")
        kept = 0
        for idx in order[:n_flip]:
            q_try = q.copy()
            q_try[idx] = -q_try[idx]
            try:
                tx = _tx_power(chan, p, q_try)
            except SingularChannel:
                continue
            if tx > cfg.Pmax + BUDGET_TOL:
                continue
            g_try = -0.5 * cfg.P0 * float(q_try.sum()) + tx
            if g_try < g:
                q, g = q_try, g_try
                kept += 1
        if kept < params.eps:
            break
    return RisConfig(q=q.astype(int))
