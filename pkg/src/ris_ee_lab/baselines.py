"""Reference RIS states and exhaustive enumeration oracles.

random_ris / all_off_ris supply the comparison states, successive_update is
the in-order single-flip sweep, and the brute_force_* oracles enumerate all
2^N sign vectors at small N to certify the search heuristics. Enumeration is
lexicographic with -1 < +1 and improvements are accepted only when strict, so
ties resolve to the lexicographically smallest state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import AllInfeasible, CapExceeded, Infeasible, SingularChannel
from .model import (
    BUDGET_TOL,
    ChannelRealization,
    RisConfig,
    effective_channel,
    metrics,
    t_coefficients,
)
from .power_alloc import alloc_problem, dinkelbach
from .ris_gradient import _is_feasible, feasible_start

__all__ = [
    "OracleResult",
    "random_ris",
    "all_off_ris",
    "successive_update",
    "brute_force_g",
    "brute_force_ee",
    "BRUTE_FORCE_G_CAP",
    "BRUTE_FORCE_EE_CAP",
]

BRUTE_FORCE_G_CAP = 20
BRUTE_FORCE_EE_CAP = 16


@dataclass(frozen=True)
class OracleResult:
    """Outcome of enumerating q in {-1, +1}^N.

    best_value is in watts for the g oracle and bits/Joule for the EE oracle;
    evaluated_count is always 2^N, infeasible_count the states skipped for a
    singular cascade or a violated budget.
    """

    best_q: RisConfig
    best_value: float
    evaluated_count: int
    infeasible_count: int


def random_ris(n: int, seed: int = 0) -> RisConfig:
    """Uniform i.i.d. +-1 state, deterministic per seed."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    rng = np.random.default_rng(seed)
    return RisConfig(q=rng.choice((-1, 1), size=n))


def all_off_ris(n: int) -> RisConfig:
    """All elements at phase 0 (q = +1): the cascade reduces to F^H G."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return RisConfig(q=np.ones(n, dtype=np.int8))


def _flip_value(cfg: SystemConfig, chan: ChannelRealization, p: np.ndarray, q: np.ndarray):
    """(g, tx) at q, or None when the state is singular."""
    try:
        t = t_coefficients(effective_channel(chan, q))
    except SingularChannel:
        return None
    tx = float(p @ t)
    return -0.5 * cfg.P0 * float(q.sum()) + tx, tx


def successive_update(
    cfg: SystemConfig,
    chan: ChannelRealization,
    p,
    q0=None,
    max_sweeps: int = 50,
) -> RisConfig:
    """Sweep elements in index order, flipping each iff the flip keeps the
    budget and strictly lowers g; stop when a full sweep keeps nothing."""
    p = np.asarray(p, dtype=float)
    if q0 is not None:
        q = np.asarray(q0.q if isinstance(q0, RisConfig) else q0, dtype=float)
        if not _is_feasible(cfg, chan, p, q):
            q = feasible_start(cfg, chan, p)
    else:
        q = feasible_start(cfg, chan, p)
    q = q.copy()
    g, _ = _flip_value(cfg, chan, p, q)
    for _sweep in range(max_sweeps):
        kept = 0
        for n in range(chan.N):
            q_try = q.copy()
            q_try[n] = -q_try[n]
            value = _flip_value(cfg, chan, p, q_try)
            if value is None:
                continue
            g_try, tx = value
            if tx > cfg.Pmax + BUDGET_TOL or g_try >= g:
                continue
            q, g = q_try, g_try
            kept += 1
        if kept == 0:
            break
    return RisConfig(q=q.astype(int))


def _lex_states(n: int):
    """All sign vectors in lexicographic order with -1 < +1 (all -1 first)."""
    shifts = np.arange(n - 1, -1, -1)
    for i in range(1 << n):
        yield (2 * ((i >> shifts) & 1) - 1).astype(float)


def brute_force_g(cfg: SystemConfig, chan: ChannelRealization, p) -> OracleResult:
    """Feasible minimizer of g over all 2^N states (N <= 20)."""
    if chan.N > BRUTE_FORCE_G_CAP:
        raise CapExceeded(f"N={chan.N} exceeds the enumeration cap {BRUTE_FORCE_G_CAP}")
    p = np.asarray(p, dtype=float)
    best_q, best_g, infeasible = None, np.inf, 0
    for q in _lex_states(chan.N):
        value = _flip_value(cfg, chan, p, q)
        if value is None or value[1] > cfg.Pmax + BUDGET_TOL:
            infeasible += 1
            continue
        if value[0] < best_g:
            best_q, best_g = q, value[0]
    if best_q is None:
        raise AllInfeasible("every RIS state violates the transmit budget")
    return OracleResult(
        best_q=RisConfig(q=best_q.astype(int)),
        best_value=best_g,
        evaluated_count=1 << chan.N,
        infeasible_count=infeasible,
    )


def brute_force_ee(cfg: SystemConfig, chan: ChannelRealization) -> OracleResult:
    """Max-EE state over all 2^N candidates, each with its own optimal
    allocation (N <= 16); the value is the global optimum under ZF."""
    if chan.N > BRUTE_FORCE_EE_CAP:
        raise CapExceeded(f"N={chan.N} exceeds the enumeration cap {BRUTE_FORCE_EE_CAP}")
    best_ris, best_ee, infeasible = None, -np.inf, 0
    for q in _lex_states(chan.N):
        ris = RisConfig(q=q.astype(int))
        try:
            t = t_coefficients(effective_channel(chan, ris))
            alloc = dinkelbach(alloc_problem(cfg, t, ris.on_count))
        except (SingularChannel, Infeasible):
            infeasible += 1
            continue
        ee = metrics(cfg, ris, alloc.p, t).ee
        if ee > best_ee:
            best_ris, best_ee = ris, ee
    if best_ris is None:
        raise AllInfeasible("no RIS state admits a feasible allocation")
    return OracleResult(
        best_q=best_ris,
        best_value=best_ee,
        evaluated_count=1 << chan.N,
        infeasible_count=infeasible,
    )
