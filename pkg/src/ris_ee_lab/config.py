"""Scenario constants for the 1-bit RIS-assisted MU-MISO downlink.

All powers are in watts, bandwidth in hertz, distances in meters; the thermal
noise density is given in dBm/Hz and converted once, inside ``sigma2``.
Defaults describe the reference scenario: an 8x8 surface, an 8-antenna base
station, four users at 200 m, 180 kHz of bandwidth at 3.5 GHz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["SystemConfig"]


@dataclass(frozen=True)
class SystemConfig:
    M1: int = 8                 # BS array, horizontal elements
    M2: int = 1                 # BS array, vertical elements
    N1: int = 8                 # RIS, horizontal elements
    N2: int = 8                 # RIS, vertical elements
    K: int = 4                  # single-antenna users
    P_static: float = 10.0      # circuit power drawn regardless of configuration [W]
    P0: float = 10e-3           # per-element dissipation while its PIN diode is ON [W]
    Pmax: float = 10.0 ** 0.5   # transmit power budget [W] (5 dBW)
    nu: float = 1.0             # power-amplifier efficiency, in (0, 1]
    SE_min: float = 1e-4        # per-user spectral-efficiency floor [bits/s/Hz]
    BW: float = 180e3           # bandwidth [Hz]
    n0: float = -174.0          # thermal noise density [dBm/Hz]
    fc: float = 3.5e9           # carrier frequency [Hz]; phases assume half-wavelength spacing
    d_BS: float = 200.0         # BS-RIS distance [m]
    d_UE: float = 200.0         # RIS-user distance [m]
    kappa: float = 10.0         # Rician factor (linear)
    pl0_dB: float = 30.0        # path loss at 1 m [dB]
    pl_exp: float = 2.2         # path-loss exponent
    azimuth_range: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    elevation_range: tuple[float, float] = (math.pi / 3, 2 * math.pi / 3)

    def __post_init__(self) -> None:
        for name in ("M1", "M2", "N1", "N2", "K"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name in ("P_static", "Pmax", "BW", "fc", "d_BS", "d_UE"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.P0 < 0:
            raise ValueError("P0 must be nonnegative")
        if not 0 < self.nu <= 1:
            raise ValueError("nu must lie in (0, 1]")
        if self.SE_min < 0:
            raise ValueError("SE_min must be nonnegative")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.K > min(self.M, self.N):
            raise ValueError(
                f"K={self.K} exceeds min(M, N)={min(self.M, self.N)}; "
                "zero-forcing needs at least as many BS antennas and RIS elements as users"
            )
        for name in ("azimuth_range", "elevation_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must be an increasing (lo, hi) pair")

    @property
    def M(self) -> int:
        return self.M1 * self.M2

    @property
    def N(self) -> int:
        return self.N1 * self.N2

    @property
    def sigma2(self) -> float:
        """Noise power BW * 10^((n0 - 30)/10) in watts."""
        return self.BW * 10.0 ** ((self.n0 - 30.0) / 10.0)

    @property
    def p_min(self) -> float:
        """Received-power floor sigma2 * (2^SE_min - 1) enforcing the SE floor."""
        return self.sigma2 * (2.0 ** self.SE_min - 1.0)
