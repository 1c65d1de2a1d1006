"""Required transmit power versus zenith angle at H = 17 km.

FOV and beam width are re-optimized at every trial power. Targets 1e-4,
1e-5 and 1e-6; sigma_o = 10 mrad.
"""

import math

from hapfso import LinkDesign
from hapfso.atmosphere import LinkGeometry
from hapfso.optimize import zenith_budget


def main():
    base = LinkDesign(geometry=LinkGeometry(17e3, 0.0, math.radians(10)), sigma_o_rad=0.010)
    print("target,zenith_deg,required_p_t_dbm,w_z_m,theta_fov_mrad,outage")
    for target in (1e-4, 1e-5, 1e-6):
        for r in zenith_budget(base, [10, 20, 30, 40, 50, 60], target):
            print(f"{target:g},{r.zenith_deg:g},{r.required_p_t_dbm:.3f},{r.w_z_m:.4f},"
                  f"{r.theta_fov_rad * 1e3:.2f},{r.outage:.4g}")


if __name__ == "__main__":
    main()
