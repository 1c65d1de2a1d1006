"""Outage-minimizing received beam radius for sigma_d in 0.1..1.0 m.

P_t = 5 dBm, theta_FOV = 45 mrad, sigma_o = 10 mrad. Also prints the
transmit waist that produces each optimum.
"""

import numpy as np

from hapfso import LinkDesign
from hapfso.optimize import implied_tx_waist, optimize_beam_waist


def main():
    print("sigma_d_m,w_z_opt_m,w0_m,p_out_analytic")
    for sd in np.round(np.arange(0.1, 1.01, 0.1), 2):
        design = LinkDesign(theta_fov_rad=0.045, sigma_d_m=float(sd))
        rep = optimize_beam_waist(design)
        w0 = implied_tx_waist(design.replace(w_z_m=rep.argmin))
        print(f"{sd:g},{rep.argmin:.4f},{w0:.4g},{rep.objective:.4g}")


if __name__ == "__main__":
    main()
