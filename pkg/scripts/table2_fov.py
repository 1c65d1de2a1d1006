"""Outage-minimizing FOV for sigma_o in 5..18 mrad.

P_t = 5 dBm, w_Z/r_a = 10, sigma_d = 0.2 m. Pass --mc to add a Monte-Carlo
outage at each optimum.
"""

import argparse

from hapfso import LinkDesign
from hapfso.montecarlo import SimConfig
from hapfso.optimize import optimize_fov


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mc", action="store_true")
    args = ap.parse_args()
    mc = SimConfig(n_trials=4_000_000, seed=0) if args.mc else None
    print("sigma_o_mrad,theta_fov_opt_mrad,p_out_analytic,p_out_mc")
    for s_o in (5, 8, 10, 12, 14, 16, 18):
        rep = optimize_fov(LinkDesign(w_z_m=0.5, sigma_d_m=0.2, sigma_o_rad=s_o * 1e-3), mc=mc)
        p_mc = rep.mc_check["outage_mc"] if rep.mc_check else float("nan")
        print(f"{s_o},{rep.argmin * 1e3:.2f},{rep.objective:.4g},{p_mc:.4g}")


if __name__ == "__main__":
    main()
