"""DC operating point by Newton-Raphson on the modified nodal equations.

Unknowns are the non-ground node voltages followed by one branch current per
voltage source and per inductor (inductors are 0 V sources at DC, capacitors
are open). Branch currents follow the SPICE sign convention: positive current
flows into the ``+`` terminal, through the element, and out of ``-``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from cryoamp.device import StatzParams, small_signal, statz_eval
from cryoamp.netlist import GROUND, Element, ElementKind, Netlist, validate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DCOptions:
    v_tol: float = 1e-9  # V, largest Newton update
    i_tol: float = 1e-12  # A, KCL residual
    max_iter: int = 100
    gmin: float = 1e-12  # S, Jacobian regularisation only
    source_steps: int = 10
    max_step: float = 0.5  # V, Newton update clamp


class SingularCircuitError(RuntimeError):
    """The MNA matrix is singular; ``diagnostics`` name the offending structure."""

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, op: "OperatingPoint | None" = None):
        super().__init__(message)
        self.op = op


class MnaLayout:
    """Index bookkeeping shared by the DC and AC assemblers."""

    def __init__(self, netlist: Netlist):
        self.netlist = netlist
        self.node_names = sorted(n for n in netlist.nodes if n != GROUND)
        self.node_index = {n: i for i, n in enumerate(self.node_names)}
        self.branch_names = [
            el.name
            for el in netlist.elements
            if el.kind in (ElementKind.VSOURCE, ElementKind.INDUCTOR)
        ]
        n = len(self.node_names)
        self.branch_index = {name: n + i for i, name in enumerate(self.branch_names)}
        self.size = n + len(self.branch_names)
        self.n_nodes = n

    def idx(self, node: str) -> int:
        """Row of a node; -1 for ground."""
        return -1 if node == GROUND else self.node_index[node]


def _add(mat, i, j, v):
    if i >= 0 and j >= 0:
        mat[i, j] += v


def _addv(vec, i, v):
    if i >= 0:
        vec[i] += v


@dataclass(frozen=True)
class FetBias:
    u_gs: float
    u_ds: float
    i_d: float
    g_m: float
    g_ds: float
    p_hemt: float


@dataclass(frozen=True)
class OperatingPoint:
    node_voltages: dict[str, float]
    source_currents: dict[str, float]
    fets: dict[str, FetBias]
    resistor_power: dict[str, float]
    converged: bool
    iterations: int
    residual: float  # A, max |KCL| over nodes
    x: np.ndarray = field(repr=False, compare=False)

    def v(self, node: str) -> float:
        return 0.0 if node == GROUND else self.node_voltages[node]

    def bias_power(self, netlist: Netlist, fet: str) -> float:
        """Dissipation of the resistors carrying this FET's DC current.

        These are the resistors incident to the FET's drain or source node
        (the source self-bias leg and the drain feed).
        """
        el = netlist.element(fet)
        d, _, s = el.nodes
        touched = {d, s} - {GROUND}
        return sum(
            self.resistor_power[r.name]
            for r in netlist.of_kind(ElementKind.RESISTOR)
            if touched & set(r.nodes)
        )


def _source_value(el: Element, overrides: dict[str, float], scale: float) -> float:
    return scale * overrides.get(el.name, el.value)


def _residual_jacobian(
    layout: MnaLayout,
    x: np.ndarray,
    overrides: dict[str, float],
    scale: float,
    gmin: float,
):
    """KCL/branch residual f(x) (without gmin) and Jacobian (with gmin)."""
    nl = layout.netlist
    f = np.zeros(layout.size)
    jac = np.zeros((layout.size, layout.size))

    def volt(node):
        i = layout.idx(node)
        return 0.0 if i < 0 else x[i]

    for el in nl.elements:
        k = el.kind
        if k is ElementKind.RESISTOR:
            a, b = (layout.idx(n) for n in el.nodes)
            g = 1.0 / el.value
            i = g * (volt(el.nodes[0]) - volt(el.nodes[1]))
            _addv(f, a, i)
            _addv(f, b, -i)
            _add(jac, a, a, g)
            _add(jac, b, b, g)
            _add(jac, a, b, -g)
            _add(jac, b, a, -g)
        elif k in (ElementKind.VSOURCE, ElementKind.INDUCTOR):
            a, b = (layout.idx(n) for n in el.nodes)
            br = layout.branch_index[el.name]
            ib = x[br]
            _addv(f, a, ib)
            _addv(f, b, -ib)
            _add(jac, a, br, 1.0)
            _add(jac, b, br, -1.0)
            emf = _source_value(el, overrides, scale) if k is ElementKind.VSOURCE else 0.0
            f[br] = volt(el.nodes[0]) - volt(el.nodes[1]) - emf
            _add(jac, br, a, 1.0)
            _add(jac, br, b, -1.0)
        elif k is ElementKind.ISOURCE:
            a, b = (layout.idx(n) for n in el.nodes)
            i = _source_value(el, overrides, scale)
            _addv(f, a, i)
            _addv(f, b, -i)
        elif k is ElementKind.VCCS:
            a, b, cp, cn = (layout.idx(n) for n in el.nodes)
            gm = el.value
            i = gm * (volt(el.nodes[2]) - volt(el.nodes[3]))
            _addv(f, a, i)
            _addv(f, b, -i)
            for row, sgn in ((a, 1.0), (b, -1.0)):
                _add(jac, row, cp, sgn * gm)
                _add(jac, row, cn, -sgn * gm)
        elif k is ElementKind.FET:
            p = nl.models[el.model]
            dn, gn, sn = el.nodes
            d, g, s = (layout.idx(n) for n in el.nodes)
            u_gs = volt(gn) - volt(sn)
            u_ds = volt(dn) - volt(sn)
            i_d, g_m, g_ds = (float(v) for v in statz_eval(p, u_gs, u_ds))
            _addv(f, d, i_d)
            _addv(f, s, -i_d)
            # dI/dVd = g_ds, dI/dVg = g_m, dI/dVs = -(g_m + g_ds)
            for row, sgn in ((d, 1.0), (s, -1.0)):
                _add(jac, row, d, sgn * g_ds)
                _add(jac, row, g, sgn * g_m)
                _add(jac, row, s, -sgn * (g_m + g_ds))
        # capacitors are open at DC

    for i in range(layout.n_nodes):
        jac[i, i] += gmin
    return f, jac


def _newton(layout, x0, overrides, scale, opts: DCOptions):
    x = x0.copy()
    n = layout.n_nodes
    for it in range(1, opts.max_iter + 1):
        f, jac = _residual_jacobian(layout, x, overrides, scale, opts.gmin)
        try:
            dx = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            raise SingularCircuitError(
                "singular MNA matrix", validate(layout.netlist)
            ) from None
        if not np.all(np.isfinite(dx)):
            raise SingularCircuitError("singular MNA matrix", validate(layout.netlist))
        dv = np.max(np.abs(dx[:n])) if n else 0.0
        if dv > opts.max_step:
            dx *= opts.max_step / dv
        x = x + dx
        f_new, _ = _residual_jacobian(layout, x, overrides, scale, opts.gmin)
        resid = np.max(np.abs(f_new[:n])) if n else 0.0
        if dv < opts.v_tol and resid < opts.i_tol:
            return x, it, True, resid
    f, _ = _residual_jacobian(layout, x, overrides, scale, opts.gmin)
    resid = np.max(np.abs(f[:n])) if n else 0.0
    return x, opts.max_iter, False, resid


def _check_structure(netlist: Netlist):
    diags = validate(netlist)
    if diags:
        raise SingularCircuitError("; ".join(d.message for d in diags), diags)


def solve_op(
    netlist: Netlist,
    *,
    overrides: dict[str, float] | None = None,
    x0: np.ndarray | None = None,
    options: DCOptions | None = None,
) -> OperatingPoint:
    """Converged DC operating point.

    ``overrides`` replaces independent-source values by element name;
    ``x0`` warm-starts Newton from a previous solution vector. If plain
    Newton fails, all independent sources are ramped up in
    ``options.source_steps`` equal steps, each solved from the previous one.
    A point that still fails is returned with ``converged=False``.
    """
    opts = options or DCOptions()
    overrides = {k.upper(): v for k, v in (overrides or {}).items()}
    _check_structure(netlist)
    layout = MnaLayout(netlist)
    start = np.zeros(layout.size) if x0 is None else np.asarray(x0, dtype=float).copy()

    x, iters, ok, resid = _newton(layout, start, overrides, 1.0, opts)
    if not ok:
        log.info("plain Newton failed (residual %.3g A); trying source stepping", resid)
        x = np.zeros(layout.size)
        total = iters
        for k in range(1, opts.source_steps + 1):
            x, it, ok, resid = _newton(layout, x, overrides, k / opts.source_steps, opts)
            total += it
        iters = total
    return _build_op(layout, x, overrides, ok, iters, resid)


def _build_op(layout: MnaLayout, x, overrides, converged, iters, resid) -> OperatingPoint:
    nl = layout.netlist
    volts = {n: float(x[i]) for n, i in layout.node_index.items()}

    def v(node):
        return 0.0 if node == GROUND else volts[node]

    currents = {
        name: float(x[layout.branch_index[name]])
        for name in layout.branch_names
        if nl.element(name).kind is ElementKind.VSOURCE
    }
    fets = {}
    for el in nl.of_kind(ElementKind.FET):
        p: StatzParams = nl.models[el.model]
        dn, gn, sn = el.nodes
        u_gs, u_ds = v(gn) - v(sn), v(dn) - v(sn)
        if u_ds < -1e-9:
            raise ValueError(f"{el.name}: reverse operation (u_ds = {u_ds:.3g} V) is not modelled")
        u_ds = max(u_ds, 0.0)
        i_d = float(statz_eval(p, u_gs, u_ds)[0])
        ss = small_signal(p, u_gs, u_ds)
        fets[el.name] = FetBias(u_gs, u_ds, i_d, ss.g_m, ss.g_ds, u_ds * i_d)
    rpow = {
        el.name: (v(el.nodes[0]) - v(el.nodes[1])) ** 2 / el.value
        for el in nl.of_kind(ElementKind.RESISTOR)
    }
    return OperatingPoint(volts, currents, fets, rpow, bool(converged), int(iters), float(resid), x.copy())


def kcl_residual(netlist: Netlist, op: OperatingPoint, overrides: dict[str, float] | None = None) -> float:
    """Max |sum of currents| over non-ground nodes at ``op`` (no gmin)."""
    layout = MnaLayout(netlist)
    ov = {k.upper(): v for k, v in (overrides or {}).items()}
    f, _ = _residual_jacobian(layout, op.x, ov, 1.0, 0.0)
    return float(np.max(np.abs(f[: layout.n_nodes]))) if layout.n_nodes else 0.0


@dataclass(frozen=True)
class SweepRow:
    u_supply: float
    i_d: float
    u_ds: float
    p_hemt: float
    p_bias: float
    op: OperatingPoint = field(repr=False)


SWEEP_COLUMNS = ("u_supply", "i_d", "u_ds", "p_hemt", "p_bias")


def sweep_values(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(math.floor(abs(stop - start) / step + 1e-9)) + 1
    sign = 1.0 if stop >= start else -1.0
    return start + sign * step * np.arange(n)


class SweepError(RuntimeError):
    def __init__(self, message: str, value: float):
        super().__init__(message)
        self.value = value


def sweep_supply(
    netlist: Netlist,
    source: str,
    start: float,
    stop: float,
    step: float,
    *,
    fet: str | None = None,
    options: DCOptions | None = None,
) -> list[SweepRow]:
    """Supply sweep, each point warm-started from the previous one.

    The reported FET defaults to the first one in the netlist; without any
    FET the drain-current column carries the supply current instead.
    """
    source = source.upper()
    src = netlist.element(source)
    if src.kind not in (ElementKind.VSOURCE, ElementKind.ISOURCE):
        raise ValueError(f"{source} is not an independent source")
    fets = netlist.of_kind(ElementKind.FET)
    fet_name = fet.upper() if fet else (fets[0].name if fets else None)

    rows = []
    x = None
    for value in sweep_values(start, stop, step):
        try:
            op = solve_op(netlist, overrides={source: float(value)}, x0=x, options=options)
        except (SingularCircuitError, ValueError) as exc:
            raise SweepError(f"sweep failed at {source} = {value:.9g}: {exc}", float(value)) from exc
        x = op.x
        if fet_name:
            b = op.fets[fet_name]
            i_d, u_ds, p_hemt = b.i_d, b.u_ds, b.p_hemt
            p_bias = op.bias_power(netlist, fet_name)
        else:
            i_d = -op.source_currents.get(source, 0.0)
            u_ds = p_hemt = 0.0
            p_bias = sum(op.resistor_power.values())
        rows.append(SweepRow(float(value), i_d, u_ds, p_hemt, p_bias, op))
    return rows


def derive_bias_resistor(p: StatzParams, u_ds: float, i_d: float) -> float:
    """Source resistor putting a grounded-gate self-biased FET at (u_ds, i_d).

    Inverts the drain-current law for u_gs and returns R_s = -u_gs / i_d.
    """
    return -gate_voltage_for(p, u_ds, i_d) / i_d


def gate_voltage_for(p: StatzParams, u_ds: float, i_d: float) -> float:
    if not i_d > 0:
        raise ValueError("target drain current must be positive (u_gs = u_t leaves R_s undefined)")
    if not u_ds > 0:
        raise ValueError("target u_ds must be positive")
    shape = p.beta * (1.0 + p.lam * u_ds) * math.tanh(p.alpha * u_ds)
    u_gs = p.u_t + math.sqrt(i_d / shape)
    if u_gs >= 0:
        raise ValueError(
            f"target unreachable with self-bias: needs u_gs = {u_gs:.4g} V >= 0"
        )
    return u_gs


def derive_drain_resistor(supply: float, u_ds: float, i_d: float, r_source: float) -> float:
    """Drain feed resistor dropping what is left of the supply at the target point."""
    r = (supply - u_ds - i_d * r_source) / i_d
    if r < 0:
        raise ValueError("supply too low for the target operating point")
    return r
