"""The two-slope threshold flux and the quantities derived from it.

For ``c > 0`` and ``0 < rho < 1``::

    G(y) = -rho * y              if y <= c
    G(y) = (1 - rho) * c - y     if y >  c

G is continuous, strictly decreasing and piecewise affine, so every wave
travels to the left with speed ``-rho`` below the threshold and ``-1`` above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJump


@dataclass(frozen=True)
class FluxParams:
    c: float
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "rho", float(self.rho))
        if not self.c > 0.0:
            raise ValueError(f"threshold c must be positive, got {self.c}")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")

    # max |G'|, used for CFL bounds
    max_speed = 1.0


def flux(fp: FluxParams, y):
    y = np.asarray(y, dtype=float)
    out = np.where(y > fp.c, (1.0 - fp.rho) * fp.c - y, -fp.rho * y)
    return float(out) if out.ndim == 0 else out


def flux_slope(fp: FluxParams, y):
    # the kink itself reports -1 so CFL estimates stay conservative
    y = np.asarray(y, dtype=float)
    out = np.where(y >= fp.c, -1.0, -fp.rho)
    return float(out) if out.ndim == 0 else out


def rankine_hugoniot_speed(fp: FluxParams, uL: float, uR: float) -> float:
    if uL == uR:
        raise DegenerateJump(f"no jump: uL = uR = {uL}")
    return (flux(fp, uR) - flux(fp, uL)) / (uR - uL)


def godunov_flux(fp: FluxParams, uL, uR):
    """Exact Riemann flux; G is non-increasing so information comes from the right."""
    return flux(fp, uR)
