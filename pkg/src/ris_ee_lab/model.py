"""Core downlink arithmetic: cascade channel, ZF power coefficients, SE/EE accounting.

Everything here is a pure function of its arguments. The cascade channel is
H^H = F^H diag(q) G with q in {-1, +1}^N; the per-user transmit-cost
coefficients are t_k = [(H^H H)^{-1}]_kk, so the transmit power for received
powers p is exactly sum_k p_k t_k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig
from .errors import SingularChannel

__all__ = [
    "ChannelRealization",
    "RisConfig",
    "PowerAllocation",
    "TracePoint",
    "EEReport",
    "effective_channel",
    "gram_inverse",
    "t_coefficients",
    "zf_precoder",
    "metrics",
    "BUDGET_TOL",
]

# Absolute slack on the transmit-power budget; allocations that bind the
# budget exactly must not flip infeasible from float roundoff in sum(p*t).
BUDGET_TOL = 1e-9


@dataclass
class ChannelRealization:
    """One draw of the RIS-BS matrix G (N x M) and the RIS-user matrix F (N x K)."""

    G: np.ndarray
    F: np.ndarray
    seed: int = 0
    angles: tuple = ()

    def __post_init__(self) -> None:
        self.G = np.asarray(self.G, dtype=complex)
        self.F = np.asarray(self.F, dtype=complex)
        if self.G.ndim != 2 or self.F.ndim != 2:
            raise ValueError("G and F must be 2-D matrices")
        if self.G.shape[0] != self.F.shape[0]:
            raise ValueError(
                f"G has {self.G.shape[0]} rows but F has {self.F.shape[0]}; both count RIS elements"
            )
        if not (np.all(np.isfinite(self.G.view(float))) and np.all(np.isfinite(self.F.view(float)))):
            raise ValueError("channel matrices must be finite")

    @property
    def N(self) -> int:
        return self.G.shape[0]

    @property
    def M(self) -> int:
        return self.G.shape[1]

    @property
    def K(self) -> int:
        return self.F.shape[1]


@dataclass
class RisConfig:
    """Binary phase state q in {-1, +1}^N; q_n = -1 means element n is ON (phase pi)."""

    q: np.ndarray

    def __post_init__(self) -> None:
        q = np.asarray(self.q)
        if q.ndim != 1 or q.size == 0:
            raise ValueError("q must be a nonempty vector")
        if not np.all(np.isin(q, (-1, 1))):
            raise ValueError("q entries must be exactly +1 or -1")
        self.q = q.astype(np.int8)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def on_count(self) -> int:
        return int((self.n - int(self.q.sum())) // 2)

    @property
    def theta(self) -> np.ndarray:
        """Per-element phases: 0 for q = +1 (OFF), pi for q = -1 (ON)."""
        return np.pi * (1 - self.q.astype(float)) / 2


@dataclass
class PowerAllocation:
    """Per-user received powers with the ratio trace of the allocation solver."""

    p: np.ndarray
    lambda_trace: list[float]
    iterations: int


@dataclass(frozen=True)
class TracePoint:
    """One half-step of an optimization trace."""

    se: float
    ee: float
    tx_power: float
    on_count: int


@dataclass
class EEReport:
    """Per-run metrics; ee = BW*se / (P_static + P0*on_count + tx_power/nu)."""

    se: float
    ee: float
    tx_power: float
    on_count: int
    feasible: bool
    trace: list[TracePoint] = field(default_factory=list)
    iterations: int = 0
    ris: RisConfig | None = None


def _as_q(ris) -> np.ndarray:
    return ris.q if isinstance(ris, RisConfig) else np.asarray(ris)


def effective_channel(chan: ChannelRealization, ris) -> np.ndarray:
    """K x M cascade H^H = F^H diag(q) G.

    Accepts a RisConfig or a raw vector; real-valued q outside {-1, +1} is
    allowed so the objective can be probed at relaxed points.
    """
    q = _as_q(ris)
    if q.shape != (chan.N,):
        raise ValueError(f"q has shape {q.shape}, expected ({chan.N},)")
    return (chan.F.conj().T * q) @ chan.G


def gram_inverse(Hh: np.ndarray, cond_cap: float = 1e12) -> np.ndarray:
    """(H^H H)^{-1} via Cholesky of the K x K gram matrix.

    Raises SingularChannel if the factorization fails or the condition number
    exceeds cond_cap.
    """
    A = Hh @ Hh.conj().T
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise SingularChannel("H^H H is not positive definite") from exc
    if np.linalg.cond(A) > cond_cap:
        raise SingularChannel(f"H^H H condition number exceeds {cond_cap:g}")
    Linv = np.linalg.solve(L, np.eye(A.shape[0], dtype=complex))
    return Linv.conj().T @ Linv


def t_coefficients(Hh: np.ndarray, cond_cap: float = 1e12) -> np.ndarray:
    """Diagonal of (H^H H)^{-1}: per-user transmit-cost coefficients, all > 0."""
    Ainv = gram_inverse(Hh, cond_cap)
    diag = np.diag(Ainv)
    scale = float(np.max(np.abs(diag.real)))
    if scale <= 0.0 or np.any(np.abs(diag.imag) > 1e-10 * scale):
        raise SingularChannel("inverse diagonal carries a non-negligible imaginary part")
    return np.ascontiguousarray(diag.real)


def _as_p(p) -> np.ndarray:
    vec = p.p if isinstance(p, PowerAllocation) else np.asarray(p, dtype=float)
    if np.any(vec < 0):
        raise ValueError("received powers must be nonnegative")
    return vec


def zf_precoder(Hh: np.ndarray, p) -> np.ndarray:
    """Zero-forcing precoder W = H (H^H H)^{-1} P^{1/2}; H^H W = P^{1/2} by construction."""
    vec = _as_p(p)
    if vec.shape != (Hh.shape[0],):
        raise ValueError("p must hold one power per user")
    Ainv = gram_inverse(Hh)
    return (Hh.conj().T @ Ainv) * np.sqrt(vec)[None, :]


def metrics(cfg: SystemConfig, ris: RisConfig, p, t: np.ndarray) -> EEReport:
    """SE/EE accounting for received powers p and cost coefficients t = t_coefficients(H^H)."""
    vec = _as_p(p)
    t = np.asarray(t, dtype=float)
    se = float(np.sum(np.log2(1.0 + vec / cfg.sigma2)))
    tx = float(vec @ t)
    on = ris.on_count
    denom = cfg.P_static + cfg.P0 * on + tx / cfg.nu
    ee = cfg.BW * se / denom
    feasible = tx <= cfg.Pmax + BUDGET_TOL and bool(np.all(vec >= cfg.p_min - 1e-12))
    return EEReport(se=se, ee=ee, tx_power=tx, on_count=on, feasible=feasible)


# re-exported for callers that only need the log base change
LN2 = math.log(2.0)
