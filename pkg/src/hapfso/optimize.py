"""Design-variable optimization on the closed-form outage.

Each optimizer scans a coarse grid and refines the bracketed minimum by
golden-section search. Objectives are minimized in log space, which keeps
the search well resolved when outage values span many decades.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .channel import ParameterRegionError, outage_terms
from .montecarlo import SimConfig, simulate
from .pointing import waist_for_received_width
from .scenario import LinkDesign
from . import turbulence

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class SweepGrid:
    variable: str
    lo: float
    hi: float
    n_points: int = 64
    scale: str = "linear"

    def __post_init__(self):
        if self.variable not in ("theta_fov", "w_z", "p_t", "zenith"):
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")
        if self.n_points < 3:
            raise ValueError("need at least 3 grid points")
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be 'linear' or 'log'")

    def points(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.n_points)
        return np.linspace(self.lo, self.hi, self.n_points)


@dataclass
class OptimumReport:
    variable: str
    argmin: float
    objective: float
    neighbors: tuple[float, float]
    neighbor_objectives: tuple[float, float]
    refinement_iterations: int
    boundary: bool = False
    trace: list[tuple[float, float]] = field(default_factory=list)
    mc_check: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "argmin": self.argmin,
            "objective": self.objective,
            "neighbors": list(self.neighbors),
            "neighbor_objectives": list(self.neighbor_objectives),
            "refinement_iterations": self.refinement_iterations,
            "boundary": self.boundary,
            "mc_check": self.mc_check,
        }


def _safe(fn: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(x):
        try:
            v = float(fn(x))
        except (ParameterRegionError, ValueError):
            return math.inf
        return v if math.isfinite(v) else math.inf
    return wrapped


def golden_section(fn: Callable[[float], float], a: float, b: float, tol: float,
                   max_iter: int = 200) -> tuple[float, float, int, list[tuple[float, float]]]:
    """Minimize a unimodal fn on [a, b] until the bracket is narrower than tol."""
    trace = []
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    trace += [(c, fc), (d, fd)]
    it = 0
    while b - a > tol and it < max_iter:
        it += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
            trace.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
            trace.append((d, fd))
    x, fx = (c, fc) if fc <= fd else (d, fd)
    return x, fx, it, trace


def scan_and_refine(variable: str, log_objective: Callable[[float], float], grid: SweepGrid,
                    tol: float, report_objective: Optional[Callable[[float], float]] = None
                    ) -> OptimumReport:
    """Coarse scan then golden-section on the bracket around the best grid point.

    ``log_objective`` drives the search; ``report_objective`` (default
    exp(log_objective)) supplies the values stored in the report.
    """
    fn = log_objective
    report = report_objective or (lambda x: math.exp(fn(x)))
    xs = grid.points()
    vals = np.array([fn(x) for x in xs])
    trace = list(zip(map(float, xs), map(float, vals)))
    if not np.any(np.isfinite(vals)):
        raise ValueError(f"objective undefined over the whole {variable} grid")
    i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.inf)))
    if i == 0 or i == len(xs) - 1:
        j = 1 if i == 0 else i - 1
        log.warning("%s optimum at grid boundary %.6g", variable, xs[i])
        return OptimumReport(variable, float(xs[i]), report(xs[i]), (float(xs[j]), float(xs[j])),
                             (report(xs[j]), report(xs[j])), 0, boundary=True, trace=trace)
    lo, hi = float(xs[i - 1]), float(xs[i + 1])
    x, fx, it, gtrace = golden_section(fn, lo, hi, tol)
    trace += gtrace
    if not fx <= vals[i]:
        # bracket not unimodal; fall back to a dense scan of the bracket
        dense = np.linspace(lo, hi, max(3, int(math.ceil((hi - lo) / tol)) + 1))
        dv = np.array([fn(t) for t in dense])
        trace += list(zip(map(float, dense), map(float, dv)))
        k = int(np.argmin(dv))
        x, fx = float(dense[k]), float(dv[k])
    # neighbors one refinement step either side, clipped to the bracket
    left, right = max(lo, x - tol), min(hi, x + tol)
    rep = OptimumReport(variable, float(x), report(x), (left, right), (report(left), report(right)),
                        it, trace=trace)
    return rep


def _log_outage(design: LinkDesign) -> float:
    d = design.derive()
    if d.pc is None:
        raise ParameterRegionError("zero pointing jitter")
    floor, smooth = outage_terms(d.model, d.pc, d.h_al, design.theta_fov_rad,
                                 design.sigma_o_rad, d.h_th)
    return math.log(floor + smooth)


def _log_smooth(design: LinkDesign) -> float:
    d = design.derive()
    if d.pc is None:
        raise ParameterRegionError("zero pointing jitter")
    _, smooth = outage_terms(d.model, d.pc, d.h_al, design.theta_fov_rad,
                             design.sigma_o_rad, d.h_th)
    return math.log(smooth)


def _outage(design: LinkDesign) -> float:
    try:
        return design.outage()
    except (ParameterRegionError, ValueError):
        return math.inf


def _mc_check(design: LinkDesign, mc: Optional[SimConfig]) -> Optional[dict]:
    if mc is None:
        return None
    r = simulate(design, mc)
    return {"outage_mc": r.outage_estimate, "ci_half_width": r.ci_half_width,
            "n_trials": r.n_trials, "seed": mc.seed}


def optimize_fov(design: LinkDesign, grid: Optional[SweepGrid] = None, tol: float = 1e-4,
                 mc: Optional[SimConfig] = None) -> OptimumReport:
    """Outage-minimizing theta_FOV (rad); tol 1e-4 rad = 0.1 mrad.

    theta_FOV moves both the capture probability and, through the background
    power, the threshold gain.
    """
    grid = grid or SweepGrid("theta_fov", 2e-3, min(3.0, 30 * design.sigma_o_rad), 64)
    fn = _safe(lambda t: _log_outage(design.replace(theta_fov_rad=t)))
    rep = scan_and_refine("theta_fov", fn, grid, tol,
                          lambda t: _outage(design.replace(theta_fov_rad=t)))
    rep.mc_check = _mc_check(design.replace(theta_fov_rad=rep.argmin), mc)
    return rep


def optimize_beam_waist(design: LinkDesign, grid: Optional[SweepGrid] = None, tol: float = 1e-3,
                        mc: Optional[SimConfig] = None) -> OptimumReport:
    """Outage-minimizing received beam radius w_Z (m).

    The AOA floor does not depend on w_Z, so the search minimizes the smooth
    part alone; the argmin is the same but stays resolvable when the floor
    dominates the total.
    """
    if grid is None:
        sigma_r = design.derive().jitter.sigma_r
        grid = SweepGrid("w_z", 5 * design.aperture_radius_m,
                         max(15 * sigma_r, 40 * design.aperture_radius_m), 64)
    fn = _safe(lambda w: _log_smooth(design.replace(w_z_m=w)))
    rep = scan_and_refine("w_z", fn, grid, tol, lambda w: _outage(design.replace(w_z_m=w)))
    rep.mc_check = _mc_check(design.replace(w_z_m=rep.argmin), mc)
    return rep


def implied_tx_waist(design: LinkDesign) -> float:
    """Transmit waist w_0 that produces the design's w_Z."""
    d = design.derive()
    return waist_for_received_width(design.w_z_m, d.path_length_m, design.wavelength_m, d.rho0_m)


def mean_snr(design: LinkDesign, w_z: Optional[float] = None, method: str = "mc",
             mc: SimConfig = SimConfig(n_trials=400_000, seed=1)) -> float:
    """Average electrical SNR eta^2 P_t^2 E[h^2] / sigma_n^2.

    method="mc" samples the channel in gate mode. method="analytic" uses
    E[h^2] = (1 - floor) h_al^2 E[h_at^2] E[h_pl^2] with the clipped
    far-field pointing loss averaged over the Rayleigh displacement.
    """
    if w_z is not None:
        design = design.replace(w_z_m=w_z)
    d = design.derive()
    scale = (design.rx.responsivity * design.query.transmit_power_w) ** 2 / d.sigma_n_sq
    if method == "mc":
        return simulate(design, SimConfig(**{**mc.__dict__, "aoa_mode": "gate"}), derived=d).mean_h_sq * scale
    if method != "analytic":
        raise ValueError("method must be 'mc' or 'analytic'")
    capture = -math.expm1(-design.theta_fov_rad ** 2 / (2 * design.sigma_o_rad ** 2))
    return scale * capture * d.h_al ** 2 * turbulence.second_moment(d.model) * _pl_second_moment(design, d)


def _pl_second_moment(design: LinkDesign, d) -> float:
    """E[min(1, C1 exp(-2 r^2/w^2))^2] for Rayleigh r with variance sigma_r^2 (theta_d ~ 0)."""
    w, ra, s2 = design.w_z_m, design.aperture_radius_m, d.jitter.sigma_r_sq
    c1 = 2 * ra ** 2 / w ** 2
    if s2 == 0:
        return min(1.0, c1) ** 2
    # r^2 / (2 s2) is unit exponential; u = exp(-r^2/(2 s2)) is uniform on (0, 1)
    k = 4 * s2 / w ** 2  # h_pl = c1 u^k
    if c1 <= 1:
        return c1 ** 2 / (2 * k + 1)
    u0 = c1 ** (-1 / k)  # clipped to 1 for u > u0
    return (1 - u0) + c1 ** 2 * u0 ** (2 * k + 1) / (2 * k + 1)


@dataclass
class ZenithBudgetRow:
    zenith_deg: float
    feasible: bool
    required_p_t_dbm: float
    w_z_m: float
    theta_fov_rad: float
    outage: float
    iterations: int
    bracket_db: float


def optimize_design(design: LinkDesign, w_grid: Optional[SweepGrid] = None,
                    fov_grid: Optional[SweepGrid] = None, n_alternations: int = 3) -> LinkDesign:
    """Alternate 1-D optimizations of theta_FOV and w_Z at the design's P_t."""
    cur = design
    for _ in range(n_alternations):
        fov = optimize_fov(cur, fov_grid)
        cur = cur.replace(theta_fov_rad=fov.argmin)
        wz = optimize_beam_waist(cur, w_grid)
        cur = cur.replace(w_z_m=wz.argmin)
    return cur


def zenith_budget(design: LinkDesign, zeniths_deg: Sequence[float], target: float,
                  p_lo_dbm: float = -60.0, p_hi_dbm: float = 40.0, tol_db: float = 1e-3,
                  optimize: bool = True, max_iter: int = 60) -> list[ZenithBudgetRow]:
    """Transmit power needed at each zenith angle to reach a target outage.

    With ``optimize`` the FOV and beam width are re-optimized at every trial
    power, so each zenith uses its own optimal design. Without it the
    design's own theta_FOV and w_Z are kept fixed, and a target below the
    AOA floor is reported infeasible.
    """
    rows = []
    for zdeg in zeniths_deg:
        base = design.with_zenith(math.radians(zdeg))

        def solve(p_dbm):
            cand = base.replace(p_t_dbm=p_dbm)
            if optimize:
                cand = optimize_design(cand, n_alternations=2)
            return cand, _outage(cand)

        if not optimize:
            floor = math.exp(-base.theta_fov_rad ** 2 / (2 * base.sigma_o_rad ** 2))
            if target <= floor:
                rows.append(ZenithBudgetRow(zdeg, False, math.nan, base.w_z_m, base.theta_fov_rad,
                                            floor, 0, math.nan))
                continue
        lo, hi = p_lo_dbm, p_hi_dbm
        cand_hi, p_hi = solve(hi)
        if p_hi > target:
            rows.append(ZenithBudgetRow(zdeg, False, math.nan, cand_hi.w_z_m,
                                        cand_hi.theta_fov_rad, p_hi, 0, math.nan))
            continue
        best, best_p = cand_hi, p_hi
        it = 0
        while hi - lo > tol_db and it < max_iter:
            it += 1
            mid = 0.5 * (lo + hi)
            cand, p = solve(mid)
            if p > target:
                lo = mid
            else:
                hi, best, best_p = mid, cand, p
        rows.append(ZenithBudgetRow(zdeg, True, hi, best.w_z_m, best.theta_fov_rad, best_p, it, hi - lo))
    return rows
