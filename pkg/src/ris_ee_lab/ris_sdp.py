"""Semidefinite relaxation of the sign-vector search with randomized rounding.

The binary objective g(q) = -P0/2 * 1^T q + sum_k p_k t_k(q) is lifted to the
bordered correlation matrix X = [[q q^T, q], [q^T, 1]] through the identity
H^H H = F0^H (X o G0) F0 (o = elementwise product); dropping rank(X) = 1
leaves a semidefinite program whose value lower-bounds g over feasible sign
vectors. The trace-of-inverse transmit power enters through an epigraph
matrix Y tied by a Schur complement, so both the objective and the budget
constraint are linear in (X, Y). Sign vectors are recovered afterwards by
Gaussian hypersphere rounding.

Channel matrices at propagation scale make the lifted coefficients span ~16
orders of magnitude, so the solve internally rescales G0 and F0 and folds the
compensation into P^{1/2}; X is dimensionless and Y stays in watts.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .config import SystemConfig
from .errors import (
    NoFeasibleRounding,
    RelaxationInfeasible,
    SingularChannel,
    SolverFailure,
)
from .model import BUDGET_TOL, ChannelRealization, RisConfig, effective_channel, t_coefficients

__all__ = [
    "SdpProblem",
    "SdpSolution",
    "assemble",
    "lift",
    "solve_relaxation",
    "round_solution",
]

# cvxpy's reduction caches are not thread-safe; sweep workers run solves
# from a thread pool, so serialize the solver calls.
_SOLVE_LOCK = threading.Lock()


@dataclass
class SdpProblem:
    """Bordered data of the lifted problem.

    E0 prices ON elements (tr(E0 X(q)) = 2 sum q), G0 carries G G^H in its
    top-left block with a zero border, F0 stacks a zero row under F, and P is
    the diagonal matrix of received powers.
    """

    E0: np.ndarray
    F0: np.ndarray
    G0: np.ndarray
    P: np.ndarray
    P0: float
    Pmax: float

    def __post_init__(self) -> None:
        self.E0 = np.asarray(self.E0, dtype=float)
        self.F0 = np.asarray(self.F0, dtype=complex)
        self.G0 = np.asarray(self.G0, dtype=complex)
        self.P = np.asarray(self.P, dtype=float)
        n1 = self.E0.shape[0]
        if self.E0.shape != (n1, n1) or self.G0.shape != (n1, n1):
            raise ValueError("E0 and G0 must be square of matching size")
        if self.F0.shape[0] != n1:
            raise ValueError("F0 must have one row per lifted dimension")
        if self.P.shape != (self.K, self.K):
            raise ValueError("P must be K x K")
        if np.any(np.diag(self.P) <= 0) or np.any(self.P - np.diag(np.diag(self.P)) != 0):
            raise ValueError("P must be diagonal with positive entries")
        if not np.allclose(self.G0, self.G0.conj().T):
            raise ValueError("G0 must be Hermitian")

    @property
    def N(self) -> int:
        return self.E0.shape[0] - 1

    @property
    def K(self) -> int:
        return self.F0.shape[1]

    @property
    def E_ii(self) -> tuple:
        """Basis diagonal matrices; tr(E_ii X) = X_ii expresses the unit diagonal."""
        eye = np.eye(self.N + 1)
        return tuple(np.diag(eye[i]) for i in range(self.N + 1))


@dataclass
class SdpSolution:
    """Relaxation output: near-PSD unit-diagonal X_tilde and its value in watts."""

    X_tilde: np.ndarray
    objective_value: float
    diagnostics: dict = field(default_factory=dict)


def assemble(cfg: SystemConfig, chan: ChannelRealization, p) -> SdpProblem:
    """Bordered matrices for one channel draw and fixed received powers."""
    p = np.asarray(p, dtype=float)
    if p.shape != (chan.K,):
        raise ValueError("p must hold one power per user")
    if np.any(p <= 0):
        raise ValueError("received powers must be positive for the lifted problem")
    n = chan.N
    E0 = np.zeros((n + 1, n + 1))
    E0[:n, n] = 1.0
    E0[n, :n] = 1.0
    F0 = np.vstack([chan.F, np.zeros((1, chan.K))])
    G0 = np.zeros((n + 1, n + 1), dtype=complex)
    G0[:n, :n] = chan.G @ chan.G.conj().T
    return SdpProblem(E0=E0, F0=F0, G0=G0, P=np.diag(p), P0=cfg.P0, Pmax=cfg.Pmax)


def lift(q) -> np.ndarray:
    """Bordered rank-one lift [[q q^T, q], [q^T, 1]] of a sign vector."""
    vec = np.asarray(q.q if isinstance(q, RisConfig) else q, dtype=float)
    x = np.concatenate([vec, [1.0]])
    return np.outer(x, x)


def _diagnostics(problem: cp.Problem) -> dict:
    stats = problem.solver_stats
    gap = None
    info = getattr(getattr(stats, "extra_stats", None), "info", None)
    for name in ("gap_abs", "duality_gap", "gap"):
        if info is not None and hasattr(info, name):
            gap = float(getattr(info, name))
            break
    return {
        "solver": stats.solver_name,
        "status": problem.status,
        "iterations": stats.num_iters,
        "solve_time": stats.solve_time,
        "gap": gap,
    }


def solve_relaxation(prob: SdpProblem) -> SdpSolution:
    """Minimize -P0/4 tr(E0 X) + tr(Y) over PSD unit-diagonal X with
    Y >= P^{1/2} M^{-1} P^{1/2} (Schur) and tr(Y) <= Pmax."""
    n, k = prob.N, prob.K
    a = float(np.linalg.norm(prob.G0[:n, :n])) / max(n, 1)
    if a <= 0.0:
        a = 1.0
    b = float(np.linalg.norm(prob.F0)) / np.sqrt(max(n * k, 1))
    if b <= 0.0:
        b = 1.0
    G0s = prob.G0 / a
    F0s = prob.F0 / b
    # scaled P^{1/2}: Y >= C M_s^{-1} C with M_s = M/(a b^2) keeps Y in watts
    C = np.diag(np.sqrt(np.diag(prob.P)) / np.sqrt(a * b * b))

    X = cp.Variable((n + 1, n + 1), symmetric=True)
    Y = cp.Variable((k, k), hermitian=True)
    M = F0s.conj().T @ cp.multiply(X, G0s) @ F0s
    schur = cp.bmat([[M, C.astype(complex)], [C.astype(complex), Y]])
    power = cp.real(cp.trace(Y))
    constraints = [X >> 0, cp.diag(X) == 1.0, schur >> 0, power <= prob.Pmax]
    objective = cp.Minimize(-0.25 * prob.P0 * cp.trace(prob.E0 @ X) + power)
    problem = cp.Problem(objective, constraints)

    last_failure = "no solver attempted"
    for solver, options in (
        (cp.CLARABEL, {}),
        (cp.SCS, {"eps_abs": 1e-8, "eps_rel": 1e-8, "max_iters": 200_000}),
    ):
        try:
            with _SOLVE_LOCK:
                problem.solve(solver=solver, **options)
        except cp.error.SolverError as exc:
            last_failure = f"{solver}: {exc}"
            continue
        if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            raise RelaxationInfeasible(
                f"transmit-power budget {prob.Pmax:g} W admits no lifted solution"
            )
        if problem.status == cp.OPTIMAL:
            break
        last_failure = f"{solver}: status {problem.status}"
    else:
        raise SolverFailure(f"relaxation did not reach optimality ({last_failure})")

    X_val = np.asarray(X.value, dtype=float)
    X_val = 0.5 * (X_val + X_val.T)
    if np.max(np.abs(np.diag(X_val) - 1.0)) > 1e-6:
        raise SolverFailure("solution violates the unit-diagonal constraint beyond 1e-6")
    if float(np.min(np.linalg.eigvalsh(X_val))) < -1e-7:
        raise SolverFailure("solution eigenvalue below -1e-7")
    return SdpSolution(
        X_tilde=X_val,
        objective_value=float(problem.value),
        diagnostics=_diagnostics(problem),
    )


def _batch_t(chan: ChannelRealization, cands: np.ndarray) -> np.ndarray:
    """t_k for a stack of +-1 candidates (C x N) -> C x K; NaN rows mark
    numerically singular grams."""
    fh = chan.F.conj().T  # K x N
    eff = np.einsum("kn,cn,nm->ckm", fh, cands, chan.G)  # C x K x M
    grams = np.einsum("ckm,clm->ckl", eff, eff.conj())  # C x K x K
    k = grams.shape[-1]
    try:
        with np.errstate(all="ignore"):
            diag = np.diagonal(np.linalg.inv(grams), axis1=1, axis2=2).real
    except np.linalg.LinAlgError:
        # an exactly singular member poisons the whole batch: recover per row
        diag = np.full((cands.shape[0], k), np.nan)
        for i in range(cands.shape[0]):
            try:
                diag[i] = np.diagonal(np.linalg.inv(grams[i])).real
            except np.linalg.LinAlgError:
                pass
    return np.where(np.isfinite(diag) & (diag > 0.0), diag, np.nan)


def round_solution(
    sol: SdpSolution,
    prob: SdpProblem,
    chan: ChannelRealization,
    p,
    n_rounds: int = 100,
    seed=0,
) -> RisConfig:
    """Gaussian hypersphere rounding: draw directions u, take sign(v_n^T u)
    from the factor V^T V = X_tilde[:N,:N], keep the feasible candidate with
    the smallest g (both mirrors evaluated; ties go lexicographically).

    Draws are generated and scored in one batch; duplicate sign patterns are
    collapsed before scoring, which leaves the returned minimizer unchanged.
    """
    if n_rounds < 1:
        raise ValueError("n_rounds must be positive")
    n = prob.N
    block = np.asarray(sol.X_tilde, dtype=float)[:n, :n]
    w, Q = np.linalg.eigh(0.5 * (block + block.T))
    if float(w.min()) < -1e-7:
        raise SolverFailure("rounding block has eigenvalue below -1e-7")
    V = np.sqrt(np.clip(w, 0.0, None))[:, None] * Q.T
    p = np.asarray(p, dtype=float)
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((n_rounds, n))
    norms = np.linalg.norm(draws, axis=1)
    draws = draws[norms > 0.0]
    proj = draws @ V  # row i = V^T u_i (scaling by 1/norm does not move signs)
    base = np.where(proj >= 0.0, 1.0, -1.0)  # sign(0) := +1
    cands = np.unique(np.vstack([base, -base]), axis=0)  # sorted => lex ties
    t_all = _batch_t(chan, cands)
    with np.errstate(invalid="ignore"):
        tx = np.nansum(t_all * p, axis=1)
        feasible = np.isfinite(t_all).all(axis=1) & (tx <= prob.Pmax + BUDGET_TOL)
    g = np.where(feasible, -0.5 * prob.P0 * cands.sum(axis=1) + tx, np.inf)
    # walk candidates in (g, lex) order; re-check the winner on the reference
    # single-config path so the returned state never fails downstream
    for idx in np.argsort(g, kind="stable"):
        if not np.isfinite(g[idx]):
            break
        q = cands[idx]
        try:
            t_ref = t_coefficients(effective_channel(chan, q))
        except SingularChannel:
            continue
        if float(p @ t_ref) <= prob.Pmax + BUDGET_TOL:
            return RisConfig(q=q.astype(int))
    raise NoFeasibleRounding("no rounded candidate satisfies the transmit budget")
