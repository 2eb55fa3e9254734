"""Seeded Rician synthesis of the RIS-BS link G and the RIS-user links F.

Each link is z * (sqrt(kappa/(1+kappa)) LoS + sqrt(1/(1+kappa)) NLoS) with
amplitude path loss z = 10^(-PL/20), PL(d) = pl0_dB + 10*pl_exp*log10(d).
The LoS parts are planar-array steering vectors at half-wavelength spacing;
NLoS entries are i.i.d. unit-variance complex Gaussian.

Randomness is split into per-component substreams of the master seed (BS-link
angles, BS-link NLoS, then per-user angles and NLoS), so changing the number
of users never perturbs G and user k's draw is independent of K.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .model import ChannelRealization

__all__ = ["AngleDraw", "steering_vector", "path_gain", "draw_channel"]

_STREAM_G_ANGLES = 0
_STREAM_G_NLOS = 1
_STREAM_F_ANGLES = 2
_STREAM_F_NLOS = 3


@dataclass(frozen=True)
class AngleDraw:
    """Azimuth/elevation seen from the RIS; primed pair is the BS side (RIS-BS link only)."""

    theta: float
    phi: float
    theta_prime: float | None = None
    phi_prime: float | None = None


def steering_vector(n1: int, n2: int, theta: float, phi: float) -> np.ndarray:
    """Unit-norm planar-array response, kron(horizontal, vertical).

    Horizontal element i carries phase pi*i*sin(theta)*sin(phi), vertical
    element j carries pi*j*cos(phi) (indices from 0, half-wavelength spacing).
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("array dimensions must be at least 1")
    h = np.exp(1j * np.pi * np.arange(n1) * np.sin(theta) * np.sin(phi))
    v = np.exp(1j * np.pi * np.arange(n2) * np.cos(phi))
    return np.kron(h, v) / np.sqrt(n1 * n2)


def path_gain(cfg: SystemConfig, d: float) -> float:
    """Amplitude gain 10^(-PL(d)/20) for distance d in meters."""
    if d <= 0:
        raise ValueError("distance must be positive")
    pl_db = cfg.pl0_dB + 10.0 * cfg.pl_exp * np.log10(d)
    return float(10.0 ** (-pl_db / 20.0))


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _angles(rng: np.random.Generator, cfg: SystemConfig) -> tuple[float, float]:
    theta = rng.uniform(*cfg.azimuth_range)
    phi = rng.uniform(*cfg.elevation_range)
    return float(theta), float(phi)


def draw_channel(cfg: SystemConfig, seed: int) -> ChannelRealization:
    """Draw (G, F) for the scenario; pure function of (cfg, seed)."""
    los_w = np.sqrt(cfg.kappa / (1.0 + cfg.kappa))
    nlos_w = np.sqrt(1.0 / (1.0 + cfg.kappa))

    ang_rng = _rng(seed, _STREAM_G_ANGLES)
    theta, phi = _angles(ang_rng, cfg)
    theta_p, phi_p = _angles(ang_rng, cfg)
    bs_draw = AngleDraw(theta=theta, phi=phi, theta_prime=theta_p, phi_prime=phi_p)

    a_n = steering_vector(cfg.N1, cfg.N2, theta, phi)
    a_m = steering_vector(cfg.M1, cfg.M2, theta_p, phi_p)
    g_los = np.sqrt(cfg.N * cfg.M) * np.outer(a_n, a_m.conj())
    g_nlos = _cn(_rng(seed, _STREAM_G_NLOS), (cfg.N, cfg.M))
    G = path_gain(cfg, cfg.d_BS) * (los_w * g_los + nlos_w * g_nlos)

    z_f = path_gain(cfg, cfg.d_UE)
    F = np.empty((cfg.N, cfg.K), dtype=complex)
    user_draws = []
    for k in range(cfg.K):
        theta_k, phi_k = _angles(_rng(seed, _STREAM_F_ANGLES, k), cfg)
        user_draws.append(AngleDraw(theta=theta_k, phi=phi_k))
        f_los = np.sqrt(cfg.N) * steering_vector(cfg.N1, cfg.N2, theta_k, phi_k)
        f_nlos = _cn(_rng(seed, _STREAM_F_NLOS, k), cfg.N)
        F[:, k] = z_f * (los_w * f_los + nlos_w * f_nlos)

    return ChannelRealization(G=G, F=F, seed=seed, angles=(bs_draw, tuple(user_draws)))
