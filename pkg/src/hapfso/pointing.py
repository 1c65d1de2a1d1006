"""Gaussian-beam geometry at the receiver and pointing-error statistics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

# Below this w_Z / r_a the constant-intensity approximation is visibly off.
FAR_FIELD_RATIO = 5.0


class DegenerateJitterError(ValueError):
    """Zero radial jitter makes the pointing-loss distribution a point mass."""


@dataclass(frozen=True)
class BeamParams:
    waist_at_tx_m: float
    wavelength_m: float
    epsilon: float = 1.0

    def __post_init__(self):
        if self.waist_at_tx_m <= 0 or self.wavelength_m <= 0:
            raise ValueError("waist and wavelength must be positive")
        if self.epsilon < 1.0:
            raise ValueError("epsilon must be >= 1")

    @classmethod
    def with_coherence_length(cls, waist_at_tx_m: float, wavelength_m: float,
                              rho0_m: float) -> "BeamParams":
        return cls(waist_at_tx_m, wavelength_m, 1.0 + 2.0 * waist_at_tx_m ** 2 / rho0_m ** 2)


@dataclass(frozen=True)
class JitterParams:
    sigma_d_m: float
    sigma_b_m: float
    sigma_o_rad: float

    def __post_init__(self):
        if min(self.sigma_d_m, self.sigma_b_m, self.sigma_o_rad) < 0:
            raise ValueError("jitter deviations must be non-negative")

    @property
    def sigma_r_sq(self) -> float:
        return self.sigma_d_m ** 2 + self.sigma_b_m ** 2

    @property
    def sigma_r(self) -> float:
        return math.sqrt(self.sigma_r_sq)


@dataclass(frozen=True)
class PointingConstants:
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        if not (0 < self.c1 <= 1 and self.c2 > 0 and self.c3 > 0):
            raise ValueError(f"invalid pointing constants {self}")


def beam_waist_at(beam: BeamParams, distance_m):
    """Beam radius w_Z after propagating distance_m."""
    z = np.asarray(distance_m, dtype=float)
    if np.any(z < 0):
        raise ValueError("distance must be non-negative")
    w0 = beam.waist_at_tx_m
    out = w0 * np.sqrt(1.0 + beam.epsilon * (beam.wavelength_m * z / (math.pi * w0 ** 2)) ** 2)
    return out if out.ndim else float(out)


def waist_for_received_width(w_z: float, distance_m: float, wavelength_m: float,
                             rho0_m: float = math.inf) -> float:
    """Invert the beam-width law: transmit waist w_0 giving radius w_z at distance_m.

    With epsilon = 1 + 2 w_0^2 / rho_0^2 the relation is a quadratic in w_0^2.
    The smaller (divergent, far-field) root is returned, matching a transmitter
    that sets w_Z through its divergence angle.
    """
    c = wavelength_m * distance_m / math.pi
    p = w_z ** 2 - 2.0 * c ** 2 / rho0_m ** 2
    disc = p ** 2 - 4.0 * c ** 2
    if p <= 0 or disc < 0:
        raise ValueError(f"beam radius {w_z:.4g} m is not reachable at {distance_m:.4g} m "
                         f"(minimum is about {math.sqrt(2 * c):.4g} m)")
    # roots multiply to c^2; this form avoids cancellation in p - sqrt(disc)
    return math.sqrt(2.0 * c ** 2 / (p + math.sqrt(disc)))


def pointing_constants(w_z: float, aperture_radius_m: float,
                       jitter: JitterParams) -> PointingConstants:
    """C1 = 2 r_a^2 / w_Z^2, C2 = 2 / w_Z^2, C3 = w_Z^2 / (4 sigma_r^2)."""
    if jitter.sigma_r_sq == 0:
        raise DegenerateJitterError("sigma_r = 0: pointing-loss exponent C3 is infinite")
    if w_z / aperture_radius_m < FAR_FIELD_RATIO:
        warnings.warn(f"w_Z/r_a = {w_z / aperture_radius_m:.2f} < {FAR_FIELD_RATIO}: "
                      "far-field pointing-loss approximation is inaccurate", stacklevel=2)
    c2 = 2.0 / w_z ** 2
    return PointingConstants(c1=min(1.0, 2.0 * aperture_radius_m ** 2 / w_z ** 2), c2=c2,
                             c3=1.0 / (2.0 * c2 * jitter.sigma_r_sq))


def displacement_pdf(jitter: JitterParams, r_d):
    """Rayleigh density of the radial beam displacement."""
    s2 = jitter.sigma_r_sq
    if s2 == 0:
        raise DegenerateJitterError("sigma_r = 0")
    r = np.asarray(r_d, dtype=float)
    out = np.where(r >= 0, r / s2 * np.exp(-r ** 2 / (2 * s2)), 0.0)
    return out if out.ndim else float(out)


def pointing_loss(w_z, r_a, r_d, theta_d=0.0):
    """Far-field pointing loss (2 r_a^2/w_Z^2) exp(-2 r_d^2/w_Z^2) cos(theta_d), in [0, 1]."""
    w_z = np.asarray(w_z, dtype=float)
    out = (2.0 * r_a ** 2 / w_z ** 2) * np.exp(-2.0 * np.square(r_d) / w_z ** 2) * np.cos(theta_d)
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def conditional_pl_pdf(pc: PointingConstants, theta_d, h_pl):
    """Density of h_pl given theta_d: C1^(-C3) C3 h^(C3-1) cos(theta_d).

    Zero outside the support (0, C1 cos(theta_d)]. The expression is the
    small-angle object used by the closed forms; for theta_d > 0 its mass over
    the support is cos(theta_d)^(C3 + 1), and exactly 1 at theta_d = 0.
    """
    h = np.asarray(h_pl, dtype=float)
    c = np.cos(theta_d)
    inside = (h > 0) & (h <= pc.c1 * c)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = pc.c1 ** (-pc.c3) * pc.c3 * np.where(inside, h, 1.0) ** (pc.c3 - 1.0) * c
    out = np.where(inside, val, 0.0)
    return out if out.ndim else float(out)


def conditional_pl_cdf(pc: PointingConstants, h_pl):
    """(h/C1)^C3 on [0, C1] at theta_d = 0."""
    h = np.clip(np.asarray(h_pl, dtype=float) / pc.c1, 0.0, 1.0)
    out = h ** pc.c3
    return out if out.ndim else float(out)
