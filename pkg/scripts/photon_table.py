"""Thermal photon rates inside the shield over the 8-15 GHz, 10-30 mK grid."""

import argparse

from cryoamp.physics.radiation import (
    SHIELD_AREA,
    TABLE_BANDWIDTH,
    TABLE_FREQUENCIES,
    TABLE_TEMPERATURES,
    human_rate,
    photon_rate,
    radiance_reduction,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bandwidth", type=float, default=TABLE_BANDWIDTH)
    ap.add_argument("--area", type=float, default=SHIELD_AREA)
    args = ap.parse_args()

    print(f"bandwidth {args.bandwidth:.3g} Hz, area {args.area:.3g} m^2")
    print("T, mK  " + "".join(f"{f / 1e9:>22g} GHz" for f in TABLE_FREQUENCIES))
    for t in TABLE_TEMPERATURES:
        cells = [human_rate(photon_rate(f, t, args.area, args.bandwidth).rate) for f in TABLE_FREQUENCIES]
        print(f"{t * 1e3:5g}  " + "".join(f"{c:>26}" for c in cells))
    for f in (10e9, 450e6):
        r = radiance_reduction(f, 1.0, 0.01)
        print(f"{f / 1e9:g} GHz, 1 K -> 10 mK: radiance falls {r.orders:.2f} orders (wide band {r.wideband_orders:g})")


if __name__ == "__main__":
    main()
