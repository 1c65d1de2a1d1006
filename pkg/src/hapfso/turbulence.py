"""Turbulence fading models for the irradiance factor h_at.

Both models are normalized to unit mean. The log-normal variant is
parametrized by the Rytov variance, the gamma-gamma one by the effective
numbers of large- and small-scale eddies (alpha, beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate, special


_NARROW_LOG_GAP = 0.05


@dataclass(frozen=True)
class LogNormal:
    sigma_bu_sq: float

    def __post_init__(self):
        if not self.sigma_bu_sq > 0:
            raise ValueError("sigma_bu_sq must be positive")

    @property
    def log_mean(self) -> float:
        return -2.0 * self.sigma_bu_sq

    @property
    def log_std(self) -> float:
        return 2.0 * math.sqrt(self.sigma_bu_sq)


@dataclass(frozen=True)
class GammaGamma:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")

    @classmethod
    def from_rytov(cls, sigma_bu_sq: float) -> "GammaGamma":
        return cls(*gg_params_from_rytov(sigma_bu_sq))


TurbulenceModel = Union[LogNormal, GammaGamma]


def gg_params_from_rytov(sigma_bu_sq: float) -> tuple[float, float]:
    """Map a Rytov variance to gamma-gamma (alpha, beta).

    The saturation terms use sigma^(12/6) = sigma_Bu^2, as the mapping is
    commonly written for this link model.
    """
    s = float(sigma_bu_sq)
    if not s > 0:
        raise ValueError("Rytov variance must be positive; alpha and beta diverge at 0")
    alpha = 1.0 / math.expm1(0.49 * s / (1 + 0.56 * s) ** (7 / 6))
    beta = 1.0 / math.expm1(0.51 * s / (1 + 0.69 * s) ** (5 / 6))
    return alpha, beta


def _check_positive(h):
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise ValueError("h_at must be positive")
    return h


def log_pdf(model: TurbulenceModel, h_at):
    h = _check_positive(h_at)
    if isinstance(model, LogNormal):
        mu, sd = model.log_mean, model.log_std
        lh = np.log(h)
        return -lh - np.log(sd * math.sqrt(2 * math.pi)) - (lh - mu) ** 2 / (2 * sd ** 2)
    a, b = model.alpha, model.beta
    x = 2.0 * np.sqrt(a * b * h)
    # kve(nu, x) = kv(nu, x) * exp(x); stays finite where kv underflows
    log_k = np.log(special.kve(a - b, x)) - x
    return (math.log(2.0) + 0.5 * (a + b) * math.log(a * b)
            - special.gammaln(a) - special.gammaln(b)
            + (0.5 * (a + b) - 1.0) * np.log(h) + log_k)


def pdf(model: TurbulenceModel, h_at):
    """Density of the turbulence fading factor at h_at > 0."""
    out = np.exp(log_pdf(model, h_at))
    return out if np.ndim(out) else float(out)


def cdf(model: TurbulenceModel, h_at):
    """Distribution function.

    Log-normal is closed form. Gamma-gamma integrates the density numerically,
    which keeps it an independent check on the gamma-product sampler.
    """
    h = np.asarray(h_at, dtype=float)
    if isinstance(model, LogNormal):
        with np.errstate(divide="ignore"):
            z = (np.log(np.maximum(h, 0.0)) - model.log_mean) / model.log_std
        out = special.ndtr(z)
        return out if out.ndim else float(out)
    flat = np.atleast_1d(h).ravel()
    pos = np.sort(np.unique(flat[flat > 0]))
    if pos.size == 0:
        out = np.zeros_like(h)
        return out if out.ndim else float(out)
    f = lambda t: float(pdf(model, t))
    # integrate in u = ln h, where h f(h) is smooth; narrow gaps use a
    # fixed 16-node rule, wide ones adaptive quadrature
    g = lambda u: np.exp(u) * pdf(model, np.exp(u))
    u = np.log(pos)
    pieces = np.empty(pos.size)
    pieces[0] = integrate.quad(f, 0.0, pos[0], limit=200, epsabs=1e-13)[0]
    lo, hi = u[:-1], u[1:]
    narrow = hi - lo < _NARROW_LOG_GAP
    x, w = np.polynomial.legendre.leggauss(16)
    if np.any(narrow):
        half = 0.5 * (hi[narrow] - lo[narrow])
        mid = 0.5 * (hi[narrow] + lo[narrow])
        nodes = mid[:, None] + half[:, None] * x[None, :]
        pieces[1:][narrow] = half * (g(nodes) * w[None, :]).sum(axis=1)
    for i in np.flatnonzero(~narrow):
        pieces[i + 1] = integrate.quad(lambda t: float(g(t)), lo[i], hi[i], limit=200,
                                       epsabs=1e-13)[0]
    table = np.minimum(np.cumsum(pieces), 1.0)
    idx = np.searchsorted(pos, flat)
    res = np.where(flat > 0, table[np.minimum(idx, pos.size - 1)], 0.0).reshape(np.shape(h))
    return res if res.ndim else float(res)


def sample(model: TurbulenceModel, rng: np.random.Generator, size=None):
    """Draw h_at from an explicit generator.

    Gamma-gamma uses the product of two unit-mean gamma variates with shapes
    alpha and beta; it does not touch the density code.
    """
    if isinstance(model, LogNormal):
        return np.exp(rng.normal(model.log_mean, model.log_std, size))
    a, b = model.alpha, model.beta
    return rng.gamma(a, 1.0 / a, size) * rng.gamma(b, 1.0 / b, size)


def negative_moment(model: TurbulenceModel, order: float) -> float:
    """E[h_at^(-order)], finite for GG only while order < min(alpha, beta)."""
    s = order
    if isinstance(model, LogNormal):
        return math.exp(2.0 * model.sigma_bu_sq * s * (1.0 + s))
    a, b = model.alpha, model.beta
    if s >= min(a, b):
        return math.inf
    return math.exp(s * math.log(a * b) + special.gammaln(a - s) + special.gammaln(b - s)
                    - special.gammaln(a) - special.gammaln(b))


def second_moment(model: TurbulenceModel) -> float:
    """E[h_at^2] = 1 + scintillation index."""
    if isinstance(model, LogNormal):
        return math.exp(4.0 * model.sigma_bu_sq)
    a, b = model.alpha, model.beta
    return (1 + 1 / a) * (1 + 1 / b)
