"""Write the synthetic I-V table and the example netlists shipped in cryoamp/data.

The I-V file is synthetic: model values at (beta=0.08, vto=-0.46) with 1%
multiplicative noise, seed 4937. It stands in for measured data until a real
table is dropped into the same slot.
"""

import json
from pathlib import Path

import numpy as np

from cryoamp.device import StatzParams, synthetic_samples, write_iv_csv
from cryoamp.physics.qubit import DOUBLE_WELL_QUBIT

DATA = Path(__file__).resolve().parents[1] / "src" / "cryoamp" / "data"

DIVIDER = """\
* resistive divider
V1 in 0 DC 1
R1 in mid 1k
R2 mid 0 1k
.op
.end
"""

RC_LOWPASS = """\
* one-pole RC low-pass, corner 159.15 kHz
V1 in 0 DC 0 AC 1
R1 in out 1k
C1 out 0 1n
.ac dec 100 1k 10meg
.probe in V(in) I(V1)
.probe out V(out) I(C1)
.end
"""

SINGLE_FET = """\
* single HEMT with source self-bias and drain feed
.model MGF4937 STATZ beta=0.08 vto=-0.46 lambda=0 alpha=2 cin=0.59p rin=30k
V1 vdd 0 DC 0.44
RD vdd d 1003.45759
J1 d 0 s MGF4937
RS s 0 11198.9234
.op
.dc V1 0 0.8 0.01
.end
"""


def main():
    p = StatzParams(beta=0.08, u_t=-0.46)
    rng = np.random.default_rng(4937)
    samples = synthetic_samples(p, np.linspace(-0.42, -0.30, 5), np.linspace(0.01, 0.06, 6), 0.01, rng)
    write_iv_csv(DATA / "iv_synthetic.csv", samples)
    (DATA / "divider.cir").write_text(DIVIDER)
    (DATA / "rc_lowpass.cir").write_text(RC_LOWPASS)
    (DATA / "single_fet.cir").write_text(SINGLE_FET)
    q = DOUBLE_WELL_QUBIT
    (DATA / "double_well_qubit.json").write_text(
        json.dumps({"l": q.l, "c": q.c, "beta_l": q.beta_l, "phi_e": q.phi_e}, indent=2) + "\n"
    )
    print(f"wrote fixtures to {DATA}")


if __name__ == "__main__":
    main()
