"""Command-line front end: ``cryoamp <dc|ac|fit|spectrum|photons|brightness|match> ...``.

Tables go to standard output (or ``--out``) as CSV, JSON or SVG; summaries
go to standard error unless ``--quiet``. If ``CRYOAMP_OUT_DIR`` is set and
``--out`` is not given, output is written to ``$CRYOAMP_OUT_DIR/<command>.<ext>``.

Exit codes: 0 ok, 2 bad input or circuit diagnostics, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from cryoamp.netlist import NetlistError, parse, validate

OUT_DIR_ENV = "CRYOAMP_OUT_DIR"
EXIT_OK, EXIT_INPUT, EXIT_NOCONV = 0, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def fmt(x) -> str:
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".9g")


def _json_num(x):
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    x = float(fmt(x))
    return x if math.isfinite(x) else None


def to_csv(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(t.columns)
    for r in t.rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def to_json(t: Table) -> str:
    rows = [{c: _json_num(x) for c, x in zip(t.columns, r)} for r in t.rows]
    meta = {k: (_json_num(v) if isinstance(v, float) else v) for k, v in t.meta.items()}
    return json.dumps({"columns": t.columns, "rows": rows, "meta": meta}, indent=1) + "\n"


def builtin_path(name: str) -> Path | None:
    p = resources.files("cryoamp") / "data" / name
    return Path(str(p)) if p.is_file() else None


def resolve_input(name: str) -> Path:
    p = Path(name)
    if p.is_file():
        return p
    b = builtin_path(name)
    if b is not None:
        return b
    raise CliError(f"{name}: no such file")


def load_netlist(name: str):
    path = resolve_input(name)
    try:
        nl = parse(path.read_text(encoding="utf-8"))
    except NetlistError as exc:
        raise CliError(f"{path}: {exc}") from exc
    diags = validate(nl)
    if diags:
        raise CliError("\n".join(f"{path}: {d.kind}: {d.message}" for d in diags))
    return nl


# ---- subcommands; each returns (Table | None, svg text | None, summary lines, exit code)


def _dc_options(args):
    from cryoamp.dc import DCOptions

    return DCOptions(max_iter=args.max_iter, v_tol=args.v_tol)


def cmd_dc(args):
    from cryoamp.dc import SWEEP_COLUMNS, SweepError, solve_op, sweep_supply

    nl = load_netlist(args.netlist)
    if args.sweep:
        src, start, stop, step = args.sweep
        try:
            rows = sweep_supply(nl, src, float(start), float(stop), float(step), fet=args.fet, options=_dc_options(args))
        except (SweepError, KeyError, ValueError) as exc:
            raise CliError(str(exc)) from exc
        t = Table(list(SWEEP_COLUMNS), [[getattr(r, c) for c in SWEEP_COLUMNS] for r in rows])
        code = EXIT_OK if all(r.op.converged for r in rows) else EXIT_NOCONV
        svg = None
        if args.format == "svg":
            from cryoamp.plots import dc_sweep_svg

            supply = nl.element(src).value
            svg = dc_sweep_svg(rows, mark=supply)
        near = min(rows, key=lambda r: abs(r.u_supply - nl.element(src).value))
        summary = [
            f"{src.upper()} = {near.u_supply:.4g} V: i_d = {near.i_d * 1e6:.4g} uA, u_ds = {near.u_ds * 1e3:.4g} mV, "
            f"p_hemt = {near.p_hemt * 1e6:.4g} uW, p_bias = {near.p_bias * 1e6:.4g} uW"
        ]
        return t, svg, summary, code

    op = solve_op(nl, options=_dc_options(args))
    cols, row = [], []
    for node in sorted(op.node_voltages):
        cols.append(f"v({node})")
        row.append(op.node_voltages[node])
    for name in sorted(op.source_currents):
        cols.append(f"i({name.lower()})")
        row.append(op.source_currents[name])
    for name, b in sorted(op.fets.items()):
        for q in ("u_gs", "u_ds", "i_d", "g_m", "g_ds", "p_hemt"):
            cols.append(f"{q}({name.lower()})")
            row.append(getattr(b, q))
        cols.append(f"p_bias({name.lower()})")
        row.append(op.bias_power(nl, name))
    t = Table(cols, [row], {"iterations": op.iterations, "residual_a": op.residual})
    if args.format == "svg":
        raise CliError("svg output needs --sweep")
    summary = [f"converged={op.converged} after {op.iterations} iterations, KCL residual {op.residual:.3g} A"]
    return t, None, summary, EXIT_OK if op.converged else EXIT_NOCONV


def cmd_ac(args):
    from cryoamp.ac import gains_at, linearize, sweep_ac
    from cryoamp.dc import solve_op
    from cryoamp.netlist import AnalysisKind

    nl = load_netlist(args.netlist)
    directive = next((a for a in nl.analyses if a.kind is AnalysisKind.AC_SWEEP), None)
    f_start = args.fstart or (directive.f_start if directive else None)
    f_stop = args.fstop or (directive.f_stop if directive else None)
    ppd = args.ppd or (directive.points_per_decade if directive else 100)
    if f_start is None or f_stop is None:
        raise CliError("no .ac directive; give --fstart and --fstop")
    if not (nl.port("in") and nl.port("out")):
        raise CliError("netlist declares no .probe in/out ports")
    op = solve_op(nl, options=_dc_options(args))
    if not op.converged:
        return None, None, ["operating point did not converge"], EXIT_NOCONV
    lin = linearize(nl, op, transconductance=not args.no_gm)
    try:
        res = sweep_ac(lin, f_start, f_stop, ppd)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    cols = ["f_hz", "gv_db", "gi_db", "gp_db"]
    t = Table(cols, [list(r) for r in zip(res.frequencies, res.gv_db, res.gi_db, res.gp_db)])
    summary = [f"{f:.6g} Hz: singular matrix ({msg})" for f, msg in res.errors]
    if args.report_f:
        g = gains_at(lin, args.report_f)
        t.meta.update({f"{k}_at_report_f": v for k, v in g.items()})
        t.meta["report_f_hz"] = args.report_f
        summary.append(
            f"at {args.report_f / 1e6:.6g} MHz: G_V = {g['gv_db']:.2f} dB, G_I = {g['gi_db']:.2f} dB, "
            f"G_P = {g['gp_db']:.2f} dB (real-power ratio {g['gp_real_db']:.2f} dB)"
        )
    if res.peak:
        t.meta.update({"f_peak_hz": res.peak.f_peak, "gp_peak_db": res.peak.g_p_peak})
        bw = f"{res.peak.bw_3db / 1e6:.4g} MHz" if res.peak.bw_3db else "n/a"
        summary.append(f"peak G_P = {res.peak.g_p_peak:.2f} dB at {res.peak.f_peak / 1e6:.6g} MHz, 3 dB bandwidth {bw}")
    svg = None
    if args.format == "svg":
        from cryoamp.plots import ac_sweep_svg

        svg = ac_sweep_svg(res)
    return t, svg, summary, EXIT_OK


def cmd_fit(args):
    from cryoamp.device import DegenerateFitError, fit_statz, read_iv_csv

    path = resolve_input(args.csv)
    try:
        samples = read_iv_csv(path)
        rep = fit_statz(
            samples,
            fixed={"lam": args.lam, "alpha": args.alpha, "c_in": args.cin, "r_in": args.rin},
            init={"beta": args.init_beta, "u_t": args.init_vto},
        )
    except DegenerateFitError as exc:
        raise CliError(f"degenerate fit: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    p = rep.params
    t = Table(
        ["beta", "vto", "lambda", "alpha", "rms_residual", "iterations"],
        [[p.beta, p.u_t, p.lam, p.alpha, rep.rms_residual, rep.iterations]],
        {"model_line": p.model_line(args.name), "converged": rep.converged},
    )
    summary = [
        f"{len(samples)} samples, {rep.iterations} iterations, rms residual {rep.rms_residual:.3g} A, "
        f"converged={rep.converged}",
        p.model_line(args.name),
    ]
    return t, None, summary, EXIT_OK if rep.converged else EXIT_NOCONV


def _qubit_from(args):
    from cryoamp.physics.qubit import DOUBLE_WELL_QUBIT, QubitParams

    base = {"l": DOUBLE_WELL_QUBIT.l, "c": DOUBLE_WELL_QUBIT.c, "beta_l": DOUBLE_WELL_QUBIT.beta_l, "phi_e": DOUBLE_WELL_QUBIT.phi_e}
    if args.params:
        try:
            base.update(json.loads(resolve_input(args.params).read_text()))
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.params}: {exc}") from exc
    for k in ("l", "c", "beta_l", "phi_e"):
        v = getattr(args, k)
        if v is not None:
            base[k] = v
    try:
        return QubitParams(**{k: float(base[k]) for k in ("l", "c", "beta_l", "phi_e")})
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"bad qubit parameters: {exc}") from exc


def cmd_spectrum(args):
    import warnings

    from cryoamp.physics.qubit import Grid, assign_wells, build_hamiltonian, eigensolve

    q = _qubit_from(args)
    try:
        grid = Grid.around(q, args.half_width, args.n)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ham = build_hamiltonian(q, grid)
    spec = eigensolve(ham, args.levels)
    summary = [str(w.message) for w in caught]
    try:
        wells = assign_wells(spec)
    except ValueError:
        wells = ["-"] * args.levels
    if args.potential:
        t = Table(["phi", "potential_K"], [[a, b] for a, b in zip(spec.grid, spec.potential_k)])
    else:
        t = Table(
            ["level", "energy_K", "energy_GHz", "flux_expect_phi0"],
            [[k, spec.energies_k[k], spec.energies_ghz[k], spec.flux_expect[k]] for k in range(args.levels)],
            {"wells": ",".join(wells), "grid_n": args.n},
        )
    for k in range(args.levels):
        summary.append(f"level {k}: {spec.energies_k[k]:.4f} K, <phi> = {spec.flux_expect[k]:.4f}, {wells[k]}")
    if args.levels >= 8:
        summary.append(f"f_67 = {spec.transition_ghz(6, 7):.4g} GHz, flux jump 6->7 = {spec.flux_expect[7] - spec.flux_expect[6]:.4f} Phi0")
    svg = None
    if args.format == "svg":
        from cryoamp.plots import spectrum_svg

        svg = spectrum_svg(spec)
    return t, svg, summary, EXIT_OK


def cmd_photons(args):
    from cryoamp.physics.radiation import (
        TABLE_FREQUENCIES,
        TABLE_TEMPERATURES,
        human_rate,
        photon_rate,
    )

    if args.table:
        pairs = [(f, t) for t in TABLE_TEMPERATURES for f in TABLE_FREQUENCIES]
    else:
        if args.f is None or args.t is None:
            raise CliError("give -f and -t, or --table")
        pairs = [(args.f, args.t)]
    try:
        budgets = [photon_rate(f, t, args.area, args.bandwidth) for f, t in pairs]
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    cols = ["f_hz", "t_k", "area_m2", "bandwidth_hz", "radiance", "power_density", "rate"]
    t = Table(
        cols,
        [[b.f, b.t, b.area, b.bandwidth, b.radiance, b.power_density, b.rate] for b in budgets],
        {"bandwidth_hz": args.bandwidth, "area_m2": args.area},
    )
    summary = [f"assumed bandwidth {args.bandwidth:.3g} Hz, radiating area {args.area:.3g} m^2"]
    summary += [f"{b.f / 1e9:g} GHz, {b.t * 1e3:g} mK: {human_rate(b.rate)}" for b in budgets]
    return t, None, summary, EXIT_OK


def cmd_brightness(args):
    from cryoamp.physics.radiation import brightness_temperature

    try:
        tb = brightness_temperature(args.t_g, args.t_d, args.s12_db)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    t = Table(["t_g", "t_d", "s12_db", "t_b"], [[args.t_g, args.t_d, args.s12_db, tb]])
    return t, None, [f"T_b = {tb:.6g} K"], EXIT_OK


def cmd_match(args):
    from cryoamp.ac import design_l_match

    try:
        m = design_l_match(args.r_source, args.r_load, args.f)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    z = m.input_impedance()
    t = Table(
        ["r_source", "r_load", "f_hz", "q_match", "series_l", "shunt_c", "z_in_re", "z_in_im"],
        [[m.r_source, m.r_load, m.f, m.q_match, m.series_l, m.shunt_c, z.real, z.imag]],
        {"fragment": "\n".join(m.lines("src", "load", args.tag))},
    )
    summary = m.lines("src", "load", args.tag)
    return t, None, summary, EXIT_OK


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--quiet", action="store_true", help="suppress the summary on standard error")
    return p


def _newton_flags(p):
    p.add_argument("--max-iter", type=int, default=100, help="Newton iterations per solve")
    p.add_argument("--v-tol", type=float, default=1e-9, help="Newton voltage-step tolerance, V")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="cryoamp", description="cryogenic HEMT amplifier and measuring-cell calculations")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dc", parents=[common], help="operating point or supply sweep")
    p.add_argument("netlist", help="netlist file or name of a bundled one (e.g. two_stage_amp.cir)")
    p.add_argument("--sweep", nargs=4, metavar=("SOURCE", "START", "STOP", "STEP"))
    p.add_argument("--fet", help="FET reported in the sweep (default: first)")
    _newton_flags(p)
    p.set_defaults(func=cmd_dc)

    p = sub.add_parser("ac", parents=[common], help="small-signal sweep and port gains")
    p.add_argument("netlist")
    p.add_argument("--fstart", type=float)
    p.add_argument("--fstop", type=float)
    p.add_argument("--ppd", type=int, help="points per decade")
    p.add_argument("--report-f", type=float, default=450e6, help="frequency for the gain summary, Hz")
    p.add_argument("--no-gm", action="store_true", help="zero every transconductance (passivity check)")
    _newton_flags(p)
    p.set_defaults(func=cmd_ac)

    p = sub.add_parser("fit", parents=[common], help="fit beta and vto to an I-V table")
    p.add_argument("csv", help="CSV with header u_gs,u_ds,i_d")
    p.add_argument("--init-beta", type=float, default=0.1)
    p.add_argument("--init-vto", type=float, default=-0.55)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--cin", type=float, default=0.59e-12)
    p.add_argument("--rin", type=float, default=30e3)
    p.add_argument("--name", default="MGF4937")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("spectrum", parents=[common], help="flux-qubit levels")
    p.add_argument("--params", help="JSON with l, c, beta_l, phi_e (default: double_well_qubit.json values)")
    p.add_argument("--l", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--beta-l", dest="beta_l", type=float)
    p.add_argument("--phi-e", dest="phi_e", type=float)
    p.add_argument("--n", type=int, default=2048, help="grid points")
    p.add_argument("--half-width", type=float, default=1.2, help="grid half width around phi_e, Phi0")
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--potential", action="store_true", help="emit phi,potential_K instead of levels")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("photons", parents=[common], help="thermal photon rates")
    p.add_argument("-f", type=float, help="frequency, Hz")
    p.add_argument("-t", type=float, help="temperature, K")
    p.add_argument("--table", action="store_true", help="the 8-15 GHz x 10-30 mK grid")
    p.add_argument("--area", type=float, default=None)
    p.add_argument("--bandwidth", type=float, default=None)
    p.set_defaults(func=cmd_photons)

    p = sub.add_parser("brightness", parents=[common], help="amplifier input brightness temperature")
    p.add_argument("t_g", type=float)
    p.add_argument("t_d", type=float)
    p.add_argument("s12_db", type=float)
    p.set_defaults(func=cmd_brightness)

    p = sub.add_parser("match", parents=[common], help="low-pass L-section")
    p.add_argument("r_source", type=float)
    p.add_argument("r_load", type=float)
    p.add_argument("f", type=float)
    p.add_argument("--tag", default="M")
    p.set_defaults(func=cmd_match)
    return ap


def _defaults(args):
    if getattr(args, "command", None) == "photons":
        from cryoamp.physics.radiation import SHIELD_AREA, TABLE_BANDWIDTH

        args.area = SHIELD_AREA if args.area is None else args.area
        args.bandwidth = TABLE_BANDWIDTH if args.bandwidth is None else args.bandwidth


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _defaults(args)
    try:
        table, svg, summary, code = args.func(args)
    except CliError as exc:
        print(f"cryoamp {args.command}: {exc}", file=sys.stderr)
        return exc.code

    if args.format == "svg":
        if svg is None:
            print(f"cryoamp {args.command}: svg output is not available here", file=sys.stderr)
            return EXIT_INPUT
        text = svg
    elif table is None:
        text = ""
    elif args.format == "json":
        text = to_json(table)
    else:
        text = to_csv(table)

    out = args.out
    if out is None and os.environ.get(OUT_DIR_ENV):
        out = str(Path(os.environ[OUT_DIR_ENV]) / f"{args.command}.{args.format}")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        for line in summary:
            print(line, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
