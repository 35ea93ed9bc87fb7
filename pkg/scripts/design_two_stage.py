"""Regenerate the shipped two-stage amplifier netlist from the design targets."""

import argparse
from pathlib import Path

from cryoamp.design import design_amplifier

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "cryoamp" / "data" / "two_stage_amp.cir"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()
    d = design_amplifier()
    args.out.write_text(d.netlist_text())
    print(f"R_s = {d.r_source:.1f} Ohm, R_d = {d.r_drain:.1f} Ohm, u_gs = {d.u_gs:.4f} V")
    print(f"g_m = {d.g_m:.4g} S, g_ds = {d.g_ds:.4g} S, r_out = {d.r_out:.1f} Ohm")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
