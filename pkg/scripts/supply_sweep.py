"""Supply sweep of the shipped two-stage amplifier: I_d, U_ds, P_HEMT and P_bias."""

import argparse
from pathlib import Path

from cryoamp.cli import builtin_path
from cryoamp.dc import SWEEP_COLUMNS, sweep_supply
from cryoamp.netlist import parse
from cryoamp.plots import dc_sweep_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    nl = parse(builtin_path("two_stage_amp.cir").read_text())
    rows = sweep_supply(nl, "V1", 0.0, 0.8, 0.01)
    text = ",".join(SWEEP_COLUMNS) + "\n"
    text += "".join(",".join(f"{getattr(r, c):.9g}" for c in SWEEP_COLUMNS) + "\n" for r in rows)
    (args.out / "supply_sweep.csv").write_text(text)
    (args.out / "supply_sweep.svg").write_text(dc_sweep_svg(rows, mark=0.44))
    r = rows[44]
    print(f"U_supply = {r.u_supply:.2f} V: U_ds = {r.u_ds * 1e3:.2f} mV, I_d = {r.i_d * 1e6:.2f} uA")
    print(f"P_HEMT = {r.p_hemt * 1e6:.3f} uW, P_bias = {r.p_bias * 1e6:.2f} uW per stage")


if __name__ == "__main__":
    main()
