"""Small-signal gains of the shipped amplifier around 450 MHz, for both tank-loss readings."""

import argparse
from pathlib import Path

from cryoamp.ac import gains_at, linearize, sweep_ac
from cryoamp.cli import builtin_path
from cryoamp.dc import solve_op
from cryoamp.netlist import parse
from cryoamp.plots import ac_sweep_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    base = parse(builtin_path("two_stage_amp.cir").read_text())
    for r_p in (base.element("RP").value, 5600.0):
        nl = base.with_value("RP", r_p)
        lin = linearize(nl, solve_op(nl))
        g = gains_at(lin, 450e6)
        print(f"R_p = {r_p:7.1f} Ohm: G_V = {g['gv_db']:.2f} dB, G_I = {g['gi_db']:.2f} dB, "
              f"G_P = {g['gp_db']:.2f} dB (real-power ratio {g['gp_real_db']:.2f} dB)")
    lin = linearize(base, solve_op(base))
    res = sweep_ac(lin, 100e6, 2e9, 400)
    text = "f_hz,gv_db,gi_db,gp_db\n" + "".join(
        f"{f:.9g},{a:.9g},{b:.9g},{c:.9g}\n" for f, a, b, c in zip(res.frequencies, res.gv_db, res.gi_db, res.gp_db)
    )
    (args.out / "amplifier_gains.csv").write_text(text)
    (args.out / "amplifier_gains.svg").write_text(ac_sweep_svg(res))
    pk = res.peak
    print(f"peak G_P = {pk.g_p_peak:.2f} dB at {pk.f_peak / 1e6:.2f} MHz, 3 dB bandwidth {pk.bw_3db / 1e6:.2f} MHz")


if __name__ == "__main__":
    main()
