"""Angle-of-arrival fluctuations and receiver field of view."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


@dataclass(frozen=True)
class ReceiverFov:
    """Receiver field of view.

    ``theta_fov_rad`` is the full apex angle 2 arctan(r_p / f_c). It can be
    given directly, in which case the detector radius follows from the focal
    length.
    """

    detector_radius_m: float
    focal_length_m: float

    def __post_init__(self):
        if self.detector_radius_m <= 0 or self.focal_length_m <= 0:
            raise ValueError("detector radius and focal length must be positive")

    @classmethod
    def from_theta(cls, theta_fov_rad: float, focal_length_m: float = 0.1) -> "ReceiverFov":
        if not 0 < theta_fov_rad < math.pi:
            raise ValueError("theta_fov must lie in (0, pi)")
        return cls(focal_length_m * math.tan(theta_fov_rad / 2), focal_length_m)

    @property
    def theta_fov_rad(self) -> float:
        return 2.0 * math.atan(self.detector_radius_m / self.focal_length_m)

    @property
    def solid_angle_sr(self) -> float:
        return solid_angle(self.theta_fov_rad)


def solid_angle(theta_fov_rad):
    """Omega_FOV = 2 pi (1 - cos(theta_FOV / 2))."""
    # 4 pi sin^2(x/4) is the same quantity without cancellation at small angles
    out = 4.0 * np.pi * np.sin(np.asarray(theta_fov_rad, dtype=float) / 4.0) ** 2
    return out if out.ndim else float(out)


def theta_d_pdf(sigma_o_rad: float, theta_d):
    """Rayleigh density of the total orientation deviation."""
    if sigma_o_rad <= 0:
        raise ValueError("sigma_o must be positive")
    t = np.asarray(theta_d, dtype=float)
    s2 = sigma_o_rad ** 2
    out = np.where(t >= 0, t / s2 * np.exp(-t ** 2 / (2 * s2)), 0.0)
    return out if out.ndim else float(out)


def capture_probability(theta_fov_rad, sigma_o_rad):
    """P(theta_d < theta_FOV) = 1 - exp(-theta_FOV^2 / (2 sigma_o^2))."""
    return -np.expm1(-np.square(theta_fov_rad) / (2.0 * sigma_o_rad ** 2))


def airy_fraction(psi_over_lambda):
    """Fraction of Airy-pattern power inside radius psi: 1 - J0^2 - J1^2 at pi psi / lambda."""
    x = np.pi * np.abs(np.asarray(psi_over_lambda, dtype=float))
    out = 1.0 - special.j0(x) ** 2 - special.j1(x) ** 2
    return out if out.ndim else float(out)


def aoa_loss_exact(fov: ReceiverFov, theta_d, wavelength_m: float):
    """Detector-collected power fraction including Airy side lobes.

    Outside the FOV the focal-plane image shift is f_c tan(theta_d).
    """
    t = np.asarray(theta_d, dtype=float)
    rp = fov.detector_radius_m
    inside = airy_fraction(rp / wavelength_m)
    rd = fov.focal_length_m * np.tan(np.where(t > fov.theta_fov_rad, t, fov.theta_fov_rad))
    with np.errstate(divide="ignore", invalid="ignore"):
        side = rp / (4.0 * rd) * (airy_fraction((rd + rp) / wavelength_m)
                                  - airy_fraction((rd - rp) / wavelength_m))
    out = np.clip(np.where(t <= fov.theta_fov_rad, inside, side), 0.0, 1.0)
    return out if out.ndim else float(out)


def aoa_loss_gate(fov: ReceiverFov | float, theta_d):
    """Side-lobe-free gate: 1 strictly inside the FOV, 0 otherwise (boundary included)."""
    theta_fov = fov.theta_fov_rad if isinstance(fov, ReceiverFov) else float(fov)
    out = (np.asarray(theta_d, dtype=float) < theta_fov).astype(float)
    return out if out.ndim else float(out)
