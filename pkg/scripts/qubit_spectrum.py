"""Flux-qubit potential and levels for the double-well parameter set; writes CSV and SVG."""

import argparse
from pathlib import Path

from cryoamp.physics.qubit import DOUBLE_WELL_QUBIT, assign_wells, flux_jump, spectrum
from cryoamp.plots import spectrum_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--levels", type=int, default=12)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    s = spectrum(DOUBLE_WELL_QUBIT, args.levels)
    wells = assign_wells(s)
    lines = ["level,energy_K,energy_GHz,flux_expect_phi0,well"]
    for k in range(args.levels):
        lines.append(f"{k},{s.energies_k[k]:.9g},{s.energies_ghz[k]:.9g},{s.flux_expect[k]:.9g},{wells[k]}")
        print(f"{k:2d}  {s.energies_k[k]:8.4f} K  <phi>={s.flux_expect[k]:.4f}  {wells[k]}")
    (args.out / "qubit_levels.csv").write_text("\n".join(lines) + "\n")
    (args.out / "qubit_spectrum.svg").write_text(spectrum_svg(s))
    print(f"I_c = {DOUBLE_WELL_QUBIT.i_c * 1e6:.3f} uA")
    print(f"f_67 = {s.transition_ghz(6, 7):.3f} GHz, <phi>_7 - <phi>_6 = {flux_jump(s):.4f} Phi0")


if __name__ == "__main__":
    main()
