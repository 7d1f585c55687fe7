"""
The achievable covert-rate region
=================================

A trojan operating point (eps, lambda_t) is feasible when the pilot attack
stays covert, the monitor's threshold saturates, and the legitimate link
still decodes.  Sweeping the plane shows the region and a non-obvious
effect: the best scaling is interior, because pushing eps higher buys a
larger admissible trojan power through the detector but costs the
legitimate link its margin.
"""

import math

import numpy as np

from covertpilot import (AttackParams, ChannelParams, SystemConfig,
                         link_capacity, attack_feasibility)

channel = ChannelParams(alpha_w_sq=0.1, alpha_e_sq=0.1, sigma_w_sq=0.1,
                        sigma_e_sq=0.1, sigma_h_sq=1.0, h_w=1 + 0j, h_e=1 + 0j)
config = SystemConfig.create(channel, lambda_a=20.0,
                             r_a=0.8 * link_capacity(channel, 20.0),
                             delta_1=1 / math.sqrt(10), delta_2=0.1,
                             pilot_len=64, block_len=10_000)

##############################################################################
# Coarse text rendering of the region ('#' feasible, '.' not); rows are
# trojan powers, columns scalings.

eps_grid = np.linspace(0.0, 0.2475, 34)
lt_grid = np.linspace(0.97, 0.01, 25)
print("lambda_t")
for lt in lt_grid:
    cells = "".join(
        "#" if attack_feasibility(channel, AttackParams(float(e), float(lt)),
                                    config).feasible else "."
        for e in eps_grid)
    print(f"{lt:5.2f} |{cells}")
print("      +" + "-" * len(eps_grid))
print("       eps from 0.00 to 0.2475")

##############################################################################
# Best achievable trojan rate per scaling value: the maximum sits strictly
# inside the covert range, not at its edge.

print(f"\n{'eps':>6} {'best feasible rate (bpcu)':>26}")
for e in (0.02, 0.06, 0.10, 0.14, 0.18, 0.21):
    rates = [attack_feasibility(channel, AttackParams(e, float(lt)),
                                  config).r_t_ic
             for lt in np.linspace(0.01, 1.0, 200)
             if attack_feasibility(channel, AttackParams(e, float(lt)),
                                     config).feasible]
    print(f"{e:>6.2f} {max(rates) if rates else 0.0:>26.4f}")

##############################################################################
# The same sweep at full resolution is the CLI's job; it writes one CSV row
# per cell (see README for a plotting recipe):
#
#     covertpilot sweep --eps-min 0 --eps-max 0.2475 --eps-steps 100 \
#                       --lt-min 0.01 --lt-max 1.0 --lt-steps 100 \
#                       --out region.csv
