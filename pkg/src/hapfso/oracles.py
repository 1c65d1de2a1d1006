"""Independent reference computations used to validate the closed forms.

Nothing here calls the adaptive integrators or closed forms it checks.
Integrals use fixed-order composite Gauss-Legendre rules, tensor-product
disc quadrature, or arbitrary-precision term-by-term evaluation (mpmath).
These are slow and meant for tests and the ``validate`` command.
"""

from __future__ import annotations

import math
from typing import Callable

import mpmath as mp
import numpy as np
from scipy import integrate, special

from . import turbulence
from .atmosphere import AtmosphereProfile, LinkGeometry
from .pointing import PointingConstants
from .turbulence import TurbulenceModel


def composite_gauss_legendre(func: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                             panels: int = 10_000, order: int = 8) -> float:
    """Fixed composite Gauss-Legendre rule; ``func`` must accept arrays."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * func(nodes)))


def cn2_mp(altitude_m: float, profile: AtmosphereProfile, dps: int = 40) -> float:
    """Hufnagel-Valley C_n^2 term by term at ``dps`` decimal digits."""
    with mp.workdps(dps):
        l = mp.mpf(altitude_m)
        v = mp.mpf(profile.rms_wind_speed_mps)
        t1 = mp.mpf("0.00594") * (v / 27) ** 2 * (mp.mpf("1e-5") * l) ** 10 * mp.exp(-l / 1000)
        t2 = mp.mpf("2.7e-16") * mp.exp(-l / 1500)
        t3 = mp.mpf(profile.ground_cn2) * mp.exp(-l / 100)
        return float(t1 + t2 + t3)


def _cn2_np(l, profile: AtmosphereProfile):
    return (0.00594 * (profile.rms_wind_speed_mps / 27) ** 2 * (1e-5 * l) ** 10 * np.exp(-l / 1000)
            + 2.7e-16 * np.exp(-l / 1500) + profile.ground_cn2 * np.exp(-l / 100))


def rytov_brute(geom: LinkGeometry, profile: AtmosphereProfile, wavelength_m: float,
                panels: int = 10_000) -> float:
    """Slant-path Rytov variance by composite Gauss-Legendre."""
    k = 2 * math.pi / wavelength_m
    h0, H = geom.tx_altitude_m, geom.hap_altitude_m
    span = H - h0
    f = lambda l: _cn2_np(l, profile) * ((1 - (l - h0) / span) * (l - h0) / span) ** (5 / 6)
    integral = composite_gauss_legendre(f, h0, H, panels)
    return 2.25 * k ** (7 / 6) * span ** (5 / 6) * geom.sec_zenith ** (11 / 6) * integral


def beam_wander_brute(geom: LinkGeometry, profile: AtmosphereProfile,
                      waist_fn: Callable[[np.ndarray], np.ndarray], panels: int = 10_000) -> float:
    """Beam-wander variance 2.07 int C_n^2 (Z - s)^2 w(s)^(-1/3) dl by composite Gauss-Legendre."""
    h0, H = geom.tx_altitude_m, geom.hap_altitude_m
    Z, sec = geom.path_length_m, geom.sec_zenith

    def f(l):
        s = (l - h0) * sec
        return _cn2_np(l, profile) * (Z - s) ** 2 * waist_fn(s) ** (-1 / 3)

    return 2.07 * composite_gauss_legendre(f, h0, H, panels)


def coherence_brute(geom: LinkGeometry, profile: AtmosphereProfile, wavelength_m: float,
                    form: str = "printed", panels: int = 10_000) -> float:
    """Coherence length in the printed or the standard spherical-wave form."""
    k = 2 * math.pi / wavelength_m
    h0, H = geom.tx_altitude_m, geom.hap_altitude_m
    if form == "printed":
        f = lambda l: (0.55 * _cn2_np(l, profile) * k ** 2 * l) ** (-3 / 5)
        return composite_gauss_legendre(f, max(h0, 1.0), H, panels)
    f = lambda l: _cn2_np(l, profile) * ((l - h0) / (H - h0)) ** (5 / 3)
    integral = composite_gauss_legendre(f, h0, H, panels)
    return (1.46 * k ** 2 * geom.sec_zenith * integral) ** (-3 / 5)


def disc_power_fraction(w_z: float, r_a: float, r_d: float, n_radial: int = 200,
                        n_angular: int = 256) -> float:
    """Power of a Gaussian beam of radius w_z collected by a disc of radius r_a.

    The beam center sits r_d from the disc center. Integrates the intensity
    2/(pi w^2) exp(-2 |rho - r_d|^2 / w^2) in polar coordinates about the disc
    center: Gauss-Legendre in radius, periodic trapezoid in angle.
    """
    x, wts = np.polynomial.legendre.leggauss(n_radial)
    rho = 0.5 * r_a * (x + 1)
    w_rho = 0.5 * r_a * wts
    phi = np.arange(n_angular) * (2 * math.pi / n_angular)
    dist_sq = rho[:, None] ** 2 + r_d ** 2 - 2 * rho[:, None] * r_d * np.cos(phi)[None, :]
    intensity = 2 / (math.pi * w_z ** 2) * np.exp(-2 * dist_sq / w_z ** 2)
    ring = intensity.mean(axis=1) * 2 * math.pi
    return float(np.sum(w_rho * rho * ring))


def mixing_integral_pdf(model: TurbulenceModel, pc: PointingConstants, h_al: float,
                        theta_d: float, h_ag: float) -> float:
    """Density of h_ag = h_al h_at h_pl by direct quadrature over h_at.

    f(h) = int f_pl(h / (h_al a) | theta_d) f_at(a) / (h_al a) da, with the
    power-law pointing density supported on h_pl <= C1 cos(theta_d), so the
    integral starts at a = h / (h_al C1 cos(theta_d)). Integrated in log a.
    """
    c = math.cos(theta_d)
    a_min = h_ag / (h_al * pc.c1 * c)
    c3 = pc.c3

    def integrand(u):
        a = math.exp(u)
        x = h_ag / (h_al * a)
        f_pl = pc.c1 ** (-c3) * c3 * x ** (c3 - 1) * c
        return f_pl * float(turbulence.pdf(model, a)) / h_al  # da/a cancels 1/a

    lo = math.log(a_min)
    hi = max(lo + 1.0, math.log(60.0))
    cuts = [u for u in np.linspace(math.log(0.05), math.log(5.0), 9) if lo < u < hi]
    bounds = [lo] + cuts + [hi]
    total = 0.0
    for a, b in zip(bounds[:-1], bounds[1:]):
        val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-10, limit=400)
        total += val
    return total


def airy_fraction_mp(psi_over_lambda: float, dps: int = 30) -> float:
    """Encircled Airy energy by quadrature of 2 J1(t)^2 / t up to pi psi / lambda."""
    with mp.workdps(dps):
        x = mp.pi * mp.mpf(psi_over_lambda)
        return float(mp.quad(lambda t: 2 * mp.besselj(1, t) ** 2 / t, mp.linspace(0, x, 8)))


def first_dark_ring() -> float:
    """psi/lambda of the first Airy zero, j_{1,1} / pi."""
    return float(mp.besseljzero(1, 1) / mp.pi)


def airy_shifted_disc(r_p_over_lambda: float, r_d_over_lambda: float, n_radial: int = 400,
                      n_angular: int = 512) -> float:
    """Airy-pattern power on a disc of radius r_p whose center is r_d from the spot.

    Intensity normalized to unit total power, with radial coordinate in
    wavelengths and argument pi psi / lambda. Tensor Gauss-Legendre in radius,
    trapezoid in angle, both about the disc center.
    """
    x, wts = np.polynomial.legendre.leggauss(n_radial)
    rho = 0.5 * r_p_over_lambda * (x + 1)
    w_rho = 0.5 * r_p_over_lambda * wts
    phi = np.arange(n_angular) * (2 * math.pi / n_angular)
    psi = np.sqrt(rho[:, None] ** 2 + r_d_over_lambda ** 2
                  - 2 * rho[:, None] * r_d_over_lambda * np.cos(phi)[None, :])
    v = np.pi * psi
    with np.errstate(invalid="ignore", divide="ignore"):
        amp = np.where(v > 0, 2 * special.j1(v) / np.where(v > 0, v, 1.0), 1.0)
    # total power of amp^2 over the plane is 4/pi in these units
    intensity = amp ** 2 * (math.pi / 4)
    ring = intensity.mean(axis=1) * 2 * math.pi
    return float(np.sum(w_rho * rho * ring))


def gg_params_mp(sigma_bu_sq: float, dps: int = 40) -> tuple[float, float]:
    """GG alpha, beta at high precision from the Rytov variance."""
    with mp.workdps(dps):
        s = mp.mpf(sigma_bu_sq)
        a = 1 / (mp.exp(mp.mpf("0.49") * s / (1 + mp.mpf("0.56") * s) ** (mp.mpf(7) / 6)) - 1)
        b = 1 / (mp.exp(mp.mpf("0.51") * s / (1 + mp.mpf("0.69") * s) ** (mp.mpf(5) / 6)) - 1)
        return float(a), float(b)


def waist_mp(w0: float, wavelength_m: float, distance_m: float, epsilon: float = 1.0,
             dps: int = 40) -> float:
    with mp.workdps(dps):
        w0 = mp.mpf(w0)
        t = mp.mpf(wavelength_m) * mp.mpf(distance_m) / (mp.pi * w0 ** 2)
        return float(w0 * mp.sqrt(1 + mp.mpf(epsilon) * t ** 2))
