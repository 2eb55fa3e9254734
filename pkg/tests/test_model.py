"""Core model checks: config invariants, cascade channel, t_k coefficients, ZF, SE/EE.

Oracles here are deliberately low-tech: the cascade channel is recomputed by
triple loops, the K=3 inverse by cofactors, so none of them share code paths
with the implementation.
"""
import numpy as np
import pytest

from ris_ee_lab.config import SystemConfig
from ris_ee_lab.errors import SingularChannel
from ris_ee_lab.model import (
    ChannelRealization,
    EEReport,
    PowerAllocation,
    RisConfig,
    effective_channel,
    metrics,
    t_coefficients,
    zf_precoder,
)

# frozen in an independent scratch evaluation of BW * 10^((n0-30)/10)
SIGMA2_REFERENCE = 7.165929069962975e-16
P_MIN_REFERENCE = 4.9672156795208226e-20


def triple_product_oracle(F, q, G):
    """Entry-by-entry F^H diag(q) G, no matrix products."""
    N, K = F.shape
    M = G.shape[1]
    out = np.zeros((K, M), dtype=complex)
    for k in range(K):
        for m in range(M):
            acc = 0.0 + 0.0j
            for n in range(N):
                acc += np.conj(F[n, k]) * q[n] * G[n, m]
            out[k, m] = acc
    return out


def inverse3_cofactor_oracle(A):
    """Explicit 3x3 inverse via the adjugate."""
    a, b, c = A[0]
    d, e, f = A[1]
    g, h, i = A[2]
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    adj = np.array(
        [
            [e * i - f * h, c * h - b * i, b * f - c * e],
            [f * g - d * i, a * i - c * g, c * d - a * f],
            [d * h - e * g, b * g - a * h, a * e - b * d],
        ],
        dtype=complex,
    )
    return adj / det


def random_channel(rng, n, m, k, scale=1.0):
    G = scale * (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)
    F = scale * (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2)
    return ChannelRealization(G=G, F=F, seed=0)


def test_config_defaults_and_derived():
    cfg = SystemConfig()
    assert cfg.M == 8 and cfg.N == 64 and cfg.K == 4
    assert cfg.sigma2 == pytest.approx(SIGMA2_REFERENCE, rel=1e-12)
    assert cfg.p_min == pytest.approx(P_MIN_REFERENCE, rel=1e-12)
    assert cfg.p_min >= 0.0


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        SystemConfig(K=32)  # K > min(M, N) = 8
    with pytest.raises(ValueError):
        SystemConfig(P_static=0.0)
    with pytest.raises(ValueError):
        SystemConfig(nu=0.0)
    with pytest.raises(ValueError):
        SystemConfig(nu=1.5)
    with pytest.raises(ValueError):
        SystemConfig(kappa=-1.0)
    with pytest.raises(ValueError):
        SystemConfig(N1=0)
    # P0 = 0 is allowed (needed for gradient-ordering invariance checks)
    assert SystemConfig(P0=0.0).P0 == 0.0


def test_ris_config_validation_and_on_count():
    ris = RisConfig(q=np.array([1, -1, -1, 1]))
    assert ris.on_count == 2
    with pytest.raises(ValueError):
        RisConfig(q=np.array([1, 0, -1]))
    with pytest.raises(ValueError):
        RisConfig(q=np.array([]))


def test_on_count_matches_phase_support_by_enumeration():
    # on_count(q) must equal the number of nonzero phases theta_n = pi(1-q_n)/2
    for n in range(1, 13):
        for i in range(2 ** n):
            q = np.array([1 if (i >> (n - 1 - j)) & 1 else -1 for j in range(n)])
            ris = RisConfig(q=q)
            theta = np.pi * (1 - q) / 2
            assert ris.on_count == int(np.count_nonzero(theta))


def test_effective_channel_identity_case():
    chan = ChannelRealization(G=np.array([[1.0 + 0j]]), F=np.array([[1.0 + 0j]]), seed=0)
    Hh = effective_channel(chan, RisConfig(q=np.array([1])))
    assert Hh.shape == (1, 1)
    assert Hh[0, 0] == 1.0 + 0j


def test_effective_channel_all_off_is_fh_g():
    rng = np.random.default_rng(3)
    chan = random_channel(rng, 4, 3, 2)
    Hh = effective_channel(chan, RisConfig(q=np.ones(4, dtype=int)))
    np.testing.assert_allclose(Hh, chan.F.conj().T @ chan.G, rtol=0, atol=1e-14)


def test_effective_channel_matches_triple_product_oracle():
    rng = np.random.default_rng(7)
    chan = random_channel(rng, 4, 2, 2)
    q = np.array([1, -1, 1, -1])
    Hh = effective_channel(chan, q)
    ref = triple_product_oracle(chan.F, q, chan.G)
    assert np.linalg.norm(Hh - ref) <= 1e-12 * np.linalg.norm(ref)


def test_t_coefficients_identity_and_diagonal():
    # H^H H = I -> t = 1; H^H H = diag(2, 4) -> t = (0.5, 0.25)
    t = t_coefficients(np.eye(3, dtype=complex))
    np.testing.assert_allclose(t, np.ones(3), rtol=0, atol=1e-15)
    Hh = np.diag([np.sqrt(2.0), 2.0]).astype(complex)
    np.testing.assert_allclose(t_coefficients(Hh), [0.5, 0.25], rtol=1e-14)


def test_t_coefficients_matches_cofactor_oracle():
    rng = np.random.default_rng(11)
    Hh = (rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))) / np.sqrt(2)
    A = Hh @ Hh.conj().T
    ref = np.real(np.diag(inverse3_cofactor_oracle(A)))
    np.testing.assert_allclose(t_coefficients(Hh), ref, rtol=0, atol=1e-10)


def test_t_coefficients_positive_across_instances():
    rng = np.random.default_rng(13)
    for _ in range(100):
        k = int(rng.integers(1, 5))
        m = int(rng.integers(k, 7))
        Hh = (rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))) / np.sqrt(2)
        t = t_coefficients(Hh)
        assert t.shape == (k,)
        assert np.all(t > 0)


def test_t_coefficients_singular_raises():
    # duplicate users: rank-deficient gram matrix
    row = np.array([1.0 + 1j, 2.0 - 1j, 0.5 + 0j])
    Hh = np.vstack([row, row])
    with pytest.raises(SingularChannel):
        t_coefficients(Hh)


def test_zf_precoder_hand_case():
    Hh = np.array([[1.0 + 0j, 0.0 + 0j]])
    W = zf_precoder(Hh, np.array([4.0]))
    np.testing.assert_allclose(W, np.array([[2.0 + 0j], [0.0 + 0j]]), rtol=0, atol=1e-15)


def test_zf_identities_across_seeded_instances():
    rng = np.random.default_rng(17)
    for _ in range(100):
        k = int(rng.integers(1, 5))
        m = int(rng.integers(k, 8))
        Hh = (rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))) / np.sqrt(2)
        p = rng.uniform(0.1, 3.0, size=k)
        W = zf_precoder(Hh, p)
        residual = np.linalg.norm(Hh @ W - np.diag(np.sqrt(p)))
        assert residual <= 1e-8
        t = t_coefficients(Hh)
        tx = np.real(np.trace(W.conj().T @ W))
        assert abs(tx - p @ t) <= 1e-10 * max(1.0, abs(p @ t))


def test_zf_precoder_singular_raises():
    row = np.array([1.0 + 0j, 1.0 + 0j])
    with pytest.raises(SingularChannel):
        zf_precoder(np.vstack([row, row]), np.array([1.0, 1.0]))


def test_metrics_zero_power():
    cfg = SystemConfig(K=2, M1=2, N1=2, N2=1)
    ris = RisConfig(q=np.array([1, -1]))
    rep = metrics(cfg, ris, np.zeros(2), np.ones(2))
    assert rep.se == 0.0
    assert rep.ee == 0.0
    assert rep.tx_power == 0.0


def test_metrics_exact_logs():
    cfg = SystemConfig(K=2, M1=2, N1=2, N2=1, SE_min=0.0)
    s2 = cfg.sigma2
    ris = RisConfig(q=np.array([1, 1]))
    rep = metrics(cfg, ris, np.array([s2, 3 * s2]), np.ones(2))
    assert rep.se == pytest.approx(3.0, rel=1e-12)  # log2(2) + log2(4)


def test_metrics_identity_and_feasibility():
    cfg = SystemConfig(K=2, M1=2, N1=2, N2=1, Pmax=1.0)
    ris = RisConfig(q=np.array([-1, 1]))
    p = np.array([0.2, 0.3]) * cfg.sigma2
    t = np.array([0.5, 1.0])
    rep = metrics(cfg, ris, p, t)
    denom = cfg.P_static + cfg.P0 * ris.on_count + rep.tx_power / cfg.nu
    assert rep.ee == pytest.approx(cfg.BW * rep.se / denom, rel=1e-12)
    assert rep.feasible
    # blowing the budget flips the flag
    rep_bad = metrics(cfg, ris, np.array([3.0, 0.1]), np.array([1.0, 1.0]))
    assert not rep_bad.feasible


def test_metrics_ee_decreases_with_on_count():
    cfg = SystemConfig(K=2, M1=2, N1=2, N2=2)
    p = np.array([1.0, 2.0]) * cfg.sigma2
    t = np.array([0.4, 0.6])
    reports = [
        metrics(cfg, RisConfig(q=q), p, t)
        for q in (np.array([1, 1, 1, 1]), np.array([-1, 1, 1, 1]), np.array([-1, -1, -1, -1]))
    ]
    assert reports[0].ee > reports[1].ee > reports[2].ee


def test_power_allocation_container():
    alloc = PowerAllocation(p=np.array([1.0, 2.0]), lambda_trace=[0.1, 0.2], iterations=2)
    assert alloc.iterations == 2
    assert alloc.lambda_trace[-1] >= alloc.lambda_trace[0] - 1e-12


def test_ee_report_trace_default():
    rep = EEReport(se=1.0, ee=2.0, tx_power=0.5, on_count=3, feasible=True)
    assert rep.trace == []
