"""Monte-Carlo oracle for the composite channel.

Every random factor of h = h_al h_at h_pl h_af is drawn from its physical
construction (Gaussian position, beam-wander and orientation jitter, the
turbulence sampler), independently of the closed forms it validates.

Trials are grouped in fixed blocks of ``STREAM_BLOCK``; block ``b`` always
draws from the Philox stream keyed by (seed, b). Batch size and worker count
only change scheduling, so results are bit-identical across both.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import turbulence
from .aoa import aoa_loss_exact
from .pointing import pointing_loss
from .scenario import Derived, LinkDesign

STREAM_BLOCK = 1 << 16
MIN_EVENTS = 10


class SimConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n_trials: int = 4_000_000
    seed: int = 0
    aoa_mode: str = "gate"
    histogram_bins: int = 64
    batch_size: int = 1 << 18
    workers: int = 1

    def __post_init__(self):
        if self.n_trials < 10_000:
            raise SimConfigError("n_trials must be >= 1e4")
        if self.histogram_bins < 32:
            raise SimConfigError("histogram_bins must be >= 32")
        if self.aoa_mode not in ("gate", "exact-airy"):
            raise SimConfigError("aoa_mode must be 'gate' or 'exact-airy'")
        if self.batch_size < 1 or self.workers < 1:
            raise SimConfigError("batch_size and workers must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise SimConfigError("seed must fit in 64 bits")


@dataclass
class SimResult:
    n_trials: int
    h_th: float
    outage_estimate: float
    ci_half_width: float
    mean_snr: float
    zero_mass: float
    histogram_edges: np.ndarray
    histogram_masses: np.ndarray
    thresholds: np.ndarray = field(default_factory=lambda: np.empty(0))
    outage_curve: np.ndarray = field(default_factory=lambda: np.empty(0))
    mean_h_sq: float = 0.0
    insufficient_trials: bool = False

    def density(self) -> tuple[np.ndarray, np.ndarray]:
        """Bin centers (geometric) and density of the continuous part over finite bins."""
        e = self.histogram_edges[1:-1]
        widths = np.diff(e)
        centers = np.sqrt(e[:-1] * e[1:])
        return centers, self.histogram_masses[1:-1] / widths

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, val in out.items():
            if isinstance(val, np.ndarray):
                out[key] = [float(x) for x in val]
            elif isinstance(val, (np.floating, np.integer)):
                out[key] = val.item()
        return out

    def identical(self, other: "SimResult") -> bool:
        return self.to_dict() == other.to_dict()


def binomial_half_width(p: float, n: int) -> float:
    return 1.96 * math.sqrt(p * (1.0 - p) / n)


def histogram_edges(derived: Derived, design: LinkDesign, bins: int) -> np.ndarray:
    """Log-spaced edges scaled to the peak gain, open-ended at both sides."""
    scale = derived.h_al * min(1.0, 2.0 * design.aperture_radius_m ** 2 / design.w_z_m ** 2)
    inner = np.geomspace(scale * 1e-9, scale * 10.0, bins - 1)
    return np.concatenate(([0.0], inner, [np.inf]))


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def sample_gain(design: LinkDesign, derived: Derived, rng: np.random.Generator, n: int,
                aoa_mode: str = "gate") -> np.ndarray:
    """Draw n composite channel gains h."""
    jit = derived.jitter
    d = rng.normal(0.0, 1.0, (4, n))
    rx = jit.sigma_d_m * d[0] + jit.sigma_b_m * d[1]
    ry = jit.sigma_d_m * d[2] + jit.sigma_b_m * d[3]
    r_d = np.hypot(rx, ry)
    t = rng.normal(0.0, jit.sigma_o_rad, (2, n))
    theta_d = np.hypot(t[0], t[1])
    h_at = turbulence.sample(derived.model, rng, n)
    h_pl = pointing_loss(design.w_z_m, design.aperture_radius_m, r_d, theta_d)
    if aoa_mode == "gate":
        h_af = (theta_d < design.theta_fov_rad).astype(float)
    else:
        h_af = aoa_loss_exact(design.fov, theta_d, design.wavelength_m)
    return derived.h_al * h_at * h_pl * h_af


def _run_block(args):
    design, derived, cfg, block, n, edges, thresholds = args
    h = sample_gain(design, derived, _block_rng(cfg.seed, block), n, cfg.aoa_mode)
    zero = int(np.count_nonzero(h == 0.0))
    counts, _ = np.histogram(h[h > 0], bins=edges)
    hs = np.sort(h)
    below = np.searchsorted(hs, thresholds, side="left")
    return zero, counts, below, float(np.sum(hs * hs))


def simulate(design: LinkDesign, cfg: SimConfig = SimConfig(),
             thresholds: Optional[Sequence[float]] = None,
             derived: Optional[Derived] = None) -> SimResult:
    """Estimate outage, mean SNR and the channel histogram by sampling.

    ``thresholds`` adds an outage curve P(h < t) for several gains at no extra
    sampling cost (used for transmit-power sweeps).
    """
    derived = derived or design.derive()
    if derived.jitter.sigma_b_m < 0 or derived.h_al <= 0:
        raise SimConfigError("inconsistent precomputed constants")
    h_th = float(derived.h_th)
    extra = [] if thresholds is None else list(np.ravel(thresholds))
    thr = np.asarray([h_th] + extra, dtype=float)
    edges = histogram_edges(derived, design, cfg.histogram_bins)

    n_blocks = -(-cfg.n_trials // STREAM_BLOCK)
    sizes = [STREAM_BLOCK] * (n_blocks - 1) + [cfg.n_trials - STREAM_BLOCK * (n_blocks - 1)]
    tasks = [(design, derived, cfg, b, sizes[b], edges, thr) for b in range(n_blocks)]
    per_batch = max(1, cfg.batch_size // STREAM_BLOCK)
    if cfg.workers == 1:
        parts = [_run_block(t) for t in tasks]
    else:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(_run_block, tasks, chunksize=per_batch))

    # merge strictly in block order
    zero = 0
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    below = np.zeros(len(thr), dtype=np.int64)
    sum_sq = 0.0
    for z, c, b, s in parts:
        zero += z
        counts += c
        below += b
        sum_sq += s

    n = cfg.n_trials
    p = below[0] / n
    mean_h_sq = sum_sq / n
    rx = design.rx
    mean_snr = (rx.responsivity * design.query.transmit_power_w) ** 2 * mean_h_sq / derived.sigma_n_sq
    return SimResult(
        n_trials=n,
        h_th=h_th,
        outage_estimate=float(p),
        ci_half_width=binomial_half_width(p, n),
        mean_snr=float(mean_snr),
        zero_mass=zero / n,
        histogram_edges=edges,
        histogram_masses=counts / n,
        thresholds=thr[1:],
        outage_curve=below[1:] / n,
        mean_h_sq=mean_h_sq,
        insufficient_trials=bool(below[0] < MIN_EVENTS),
    )


def replay_determinism(design: LinkDesign, cfg: SimConfig = SimConfig(n_trials=200_000, seed=42),
                       worker_counts: Sequence[int] = (1, 4, 8)) -> bool:
    """True when every worker count reproduces the single-worker result bit for bit."""
    derived = design.derive()
    runs = [simulate(design, SimConfig(**{**asdict(cfg), "workers": w}), derived=derived)
            for w in worker_counts]
    return all(r.identical(runs[0]) for r in runs[1:])
