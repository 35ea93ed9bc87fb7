"""Small-signal AC analysis, tank-source model and L-section matching synthesis.

Gain conventions at the designated ``in``/``out`` ports (``.probe in V(n) I(X)``)::

    gv_db = 20 log10 |V_out / V_in|
    gi_db = 20 log10 |I_out / I_in|
    gp_db = 20 log10 |S_out / S_in|,  S = V conj(I) / 2

so that gp_db == gv_db + gi_db identically, which is the convention of the
reference simulations (a power ratio plotted on a 20 log scale). The physical
real-power gain 10 log10(Re S_out / Re S_in) is reported as ``gp_real_db``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from cryoamp.dc import MnaLayout, OperatingPoint
from cryoamp.netlist import GROUND, ElementKind, Netlist


class UnconvergedOperatingPoint(ValueError):
    pass


@dataclass
class LinearCircuit:
    """Frequency-domain MNA system  (G + j w C) x = b."""

    netlist: Netlist
    layout: MnaLayout
    g: np.ndarray
    c: np.ndarray
    b: np.ndarray
    # (node+, node-, conductance, capacitance) per two-terminal element, for current probes
    _branches: dict[str, tuple] = field(default_factory=dict, repr=False)
    gm: dict[str, float] = field(default_factory=dict)  # stamped transconductance per FET

    def matrix(self, f: float) -> np.ndarray:
        return self.g + 2j * math.pi * f * self.c

    def solve(self, f: float) -> np.ndarray:
        return np.linalg.solve(self.matrix(f), self.b)

    def voltage(self, x: np.ndarray, node: str) -> complex:
        i = self.layout.idx(node.lower())
        return 0j if i < 0 else complex(x[i])

    def current(self, x: np.ndarray, name: str, f: float) -> complex:
        """Phasor current through an element, from its first node to its second."""
        name = name.upper()
        if name in self.layout.branch_index:
            return complex(x[self.layout.branch_index[name]])
        if name not in self._branches:
            raise KeyError(f"no current probe for element {name}")
        a, b, gval, cval = self._branches[name]
        dv = self.voltage(x, a) - self.voltage(x, b)
        return dv * (gval + 2j * math.pi * f * cval)


def linearize(netlist: Netlist, op: OperatingPoint, *, transconductance: bool = True) -> LinearCircuit:
    """Small-signal equivalent of ``netlist`` about ``op``.

    FETs become a g_m VCCS plus g_ds between drain and source and
    c_in || r_in between gate and source. Independent sources keep only
    their AC magnitude (zero magnitude: V shorted, I opened).
    ``transconductance=False`` zeroes every g_m (passivity checks).
    """
    if not op.converged:
        raise UnconvergedOperatingPoint("operating point did not converge")
    layout = MnaLayout(netlist)
    n = layout.size
    g = np.zeros((n, n))
    c = np.zeros((n, n))
    b = np.zeros(n, dtype=complex)
    branches: dict[str, tuple] = {}
    gms: dict[str, float] = {}

    def stamp(mat, a, bnode, val):
        i, j = layout.idx(a), layout.idx(bnode)
        if i >= 0:
            mat[i, i] += val
        if j >= 0:
            mat[j, j] += val
        if i >= 0 and j >= 0:
            mat[i, j] -= val
            mat[j, i] -= val

    def vccs(out_p, out_n, ctl_p, ctl_n, gm):
        for row, sgn in ((layout.idx(out_p), 1.0), (layout.idx(out_n), -1.0)):
            if row < 0:
                continue
            cp, cn = layout.idx(ctl_p), layout.idx(ctl_n)
            if cp >= 0:
                g[row, cp] += sgn * gm
            if cn >= 0:
                g[row, cn] -= sgn * gm

    for el in netlist.elements:
        k = el.kind
        if k is ElementKind.RESISTOR:
            stamp(g, *el.nodes, 1.0 / el.value)
            branches[el.name] = (*el.nodes, 1.0 / el.value, 0.0)
        elif k is ElementKind.CAPACITOR:
            stamp(c, *el.nodes, el.value)
            branches[el.name] = (*el.nodes, 0.0, el.value)
        elif k in (ElementKind.VSOURCE, ElementKind.INDUCTOR):
            a, bn = (layout.idx(x) for x in el.nodes)
            br = layout.branch_index[el.name]
            for row, sgn in ((a, 1.0), (bn, -1.0)):
                if row >= 0:
                    g[row, br] += sgn
                    g[br, row] += sgn
            if k is ElementKind.INDUCTOR:
                c[br, br] = -el.value
            else:
                b[br] = el.ac or 0.0
        elif k is ElementKind.ISOURCE:
            a, bn = (layout.idx(x) for x in el.nodes)
            mag = el.ac or 0.0
            if a >= 0:
                b[a] -= mag
            if bn >= 0:
                b[bn] += mag
        elif k is ElementKind.VCCS:
            vccs(*el.nodes, el.value)
        elif k is ElementKind.FET:
            p = netlist.models[el.model]
            bias = op.fets[el.name]
            dn, gn, sn = el.nodes
            gms[el.name] = bias.g_m if transconductance else 0.0
            if gms[el.name]:
                vccs(dn, sn, gn, sn, gms[el.name])
            stamp(g, dn, sn, bias.g_ds)
            if p.c_in > 0:
                stamp(c, gn, sn, p.c_in)
            if 0 < p.r_in < math.inf:
                stamp(g, gn, sn, 1.0 / p.r_in)
    return LinearCircuit(netlist, layout, g, c, b, branches, gms)


def log_frequencies(f_start: float, f_stop: float, points_per_decade: int) -> np.ndarray:
    if not 0 < f_start < f_stop:
        raise ValueError("need 0 < f_start < f_stop")
    decades = math.log10(f_stop / f_start)
    n = int(math.floor(decades * points_per_decade + 1e-9)) + 1
    f = f_start * 10.0 ** (np.arange(n) / points_per_decade)
    if f[-1] < f_stop * (1 - 1e-12):
        f = np.append(f, f_stop)
    return f


@dataclass
class Peak:
    f_peak: float
    g_p_peak: float
    bw_3db: float | None


@dataclass
class ACSweepResult:
    frequencies: np.ndarray
    probes: dict[str, np.ndarray]
    v_in: np.ndarray | None = None
    i_in: np.ndarray | None = None
    v_out: np.ndarray | None = None
    i_out: np.ndarray | None = None
    gv_db: np.ndarray | None = None
    gi_db: np.ndarray | None = None
    gp_db: np.ndarray | None = None
    gp_real_db: np.ndarray | None = None
    peak: Peak | None = None
    errors: list[tuple[float, str]] = field(default_factory=list)

    def interpolated(self, f: float) -> dict[str, float]:
        """Gains interpolated (in log f) at frequency ``f``; see :func:`gains_at` for exact values."""
        lf = np.log10(self.frequencies)
        out = {}
        for name in ("gv_db", "gi_db", "gp_db", "gp_real_db"):
            arr = getattr(self, name)
            out[name] = float(np.interp(math.log10(f), lf, arr)) if arr is not None else math.nan
        return out


def _db20(x):
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.abs(x))


def sweep_ac(
    lin: LinearCircuit,
    f_start: float,
    f_stop: float,
    points_per_decade: int,
    *,
    ports: tuple[tuple[str, str], tuple[str, str]] | None = None,
) -> ACSweepResult:
    """Complex MNA solve at log-spaced frequencies, with probe phasors and port gains.

    ``ports`` is ``((in_node, in_element), (out_node, out_element))``; by
    default the netlist's ``.probe in``/``.probe out`` designations are used.
    A singular matrix at one frequency is recorded in ``errors`` and that
    point is filled with NaN.
    """
    return analyze(lin, log_frequencies(f_start, f_stop, points_per_decade), ports=ports)


def analyze(lin: LinearCircuit, freqs, *, ports=None) -> ACSweepResult:
    """Same as :func:`sweep_ac` on an explicit frequency list."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    nl = lin.netlist
    if ports is None:
        pin, pout = nl.port("in"), nl.port("out")
        ports = (pin, pout) if pin and pout else None

    probe_specs = [(f"{p.quantity}({p.target})", p) for p in nl.probes]
    probes = {key: np.full(len(freqs), np.nan, dtype=complex) for key, _ in probe_specs}
    port_v = np.full((2, len(freqs)), np.nan, dtype=complex)
    port_i = np.full((2, len(freqs)), np.nan, dtype=complex)
    errors = []

    for k, f in enumerate(freqs):
        try:
            x = lin.solve(f)
        except np.linalg.LinAlgError as exc:
            errors.append((float(f), f"singular matrix: {exc}"))
            continue
        for key, p in probe_specs:
            if p.quantity == "V":
                probes[key][k] = lin.voltage(x, p.target)
            elif p.quantity == "I":
                probes[key][k] = lin.current(x, p.target, f)
            else:
                el = nl.element(p.target)
                v = lin.voltage(x, el.nodes[0]) - lin.voltage(x, el.nodes[1])
                probes[key][k] = v * np.conj(lin.current(x, p.target, f)) / 2
        if ports:
            for j, (node, elem) in enumerate(ports):
                port_v[j, k] = lin.voltage(x, node)
                port_i[j, k] = lin.current(x, elem, f)

    res = ACSweepResult(freqs, probes, errors=errors)
    if ports:
        res.v_in, res.v_out = port_v
        res.i_in, res.i_out = port_i
        s_in = port_v[0] * np.conj(port_i[0]) / 2
        s_out = port_v[1] * np.conj(port_i[1]) / 2
        res.gv_db = _db20(port_v[1] / port_v[0])
        res.gi_db = _db20(port_i[1] / port_i[0])
        res.gp_db = _db20(s_out / s_in)
        with np.errstate(divide="ignore", invalid="ignore"):
            res.gp_real_db = 10.0 * np.log10(s_out.real / s_in.real)
        res.peak = find_peak(freqs, res.gp_db)
    return res


def gains_at(lin: LinearCircuit, f: float, ports=None) -> dict[str, float]:
    """Port gains from a direct solve at exactly ``f``."""
    res = analyze(lin, [f], ports=ports)
    return {
        name: float(getattr(res, name)[0]) for name in ("gv_db", "gi_db", "gp_db", "gp_real_db")
    }


def find_peak(freqs: np.ndarray, gain_db: np.ndarray) -> Peak | None:
    """Peak by parabolic interpolation in log f; -3 dB edges by linear interpolation."""
    ok = np.isfinite(gain_db)
    if ok.sum() < 3:
        return None
    lf = np.log10(freqs)
    k = int(np.nanargmax(np.where(ok, gain_db, -np.inf)))
    if k == 0 or k == len(freqs) - 1 or not (ok[k - 1] and ok[k + 1]):
        return Peak(float(freqs[k]), float(gain_db[k]), None)
    y0, y1, y2 = gain_db[k - 1 : k + 2]
    x0, x1, x2 = lf[k - 1 : k + 2]
    h = x1 - x0
    denom = y0 - 2 * y1 + y2
    dx = 0.5 * h * (y0 - y2) / denom if denom != 0 else 0.0
    lf_peak = x1 + dx
    g_peak = y1 - 0.25 * (y0 - y2) * dx / h if denom != 0 else y1
    level = g_peak - 3.0

    lo = hi = None
    for i in range(k, 0, -1):
        if gain_db[i - 1] < level <= gain_db[i]:
            t = (level - gain_db[i - 1]) / (gain_db[i] - gain_db[i - 1])
            lo = 10 ** (lf[i - 1] + t * (lf[i] - lf[i - 1]))
            break
    for i in range(k, len(freqs) - 1):
        if gain_db[i + 1] < level <= gain_db[i]:
            t = (gain_db[i] - level) / (gain_db[i] - gain_db[i + 1])
            hi = 10 ** (lf[i] + t * (lf[i + 1] - lf[i]))
            break
    bw = hi - lo if lo is not None and hi is not None else None
    return Peak(float(10**lf_peak), float(g_peak), bw)


@dataclass(frozen=True)
class TankSource:
    f_res: float
    q: float
    l_t: float
    drive: float = 1e-3

    def __post_init__(self):
        if not (self.f_res > 0 and self.q > 0 and self.l_t > 0):
            raise ValueError("f_res, q and l_t must be positive")


@dataclass(frozen=True)
class TankEquivalent:
    """Parallel R-L-C one-port, driven in Thevenin form through its own R_p."""

    r_p: float
    l: float
    c: float
    drive: float

    def impedance(self, f: float) -> complex:
        w = 2 * math.pi * f
        y = 1.0 / self.r_p + 1.0 / (1j * w * self.l) + 1j * w * self.c
        return 1.0 / y

    def lines(self, node: str, prefix: str = "T") -> list[str]:
        """Netlist fragment: V<prefix> drives ``node`` through R_p; L and C shunt it."""
        return [
            f"V{prefix} {node}_drv 0 DC 0 AC {self.drive:.9g}",
            f"RP{prefix} {node}_drv {node} {self.r_p:.9g}",
            f"LP{prefix} {node} 0 {self.l:.9g}",
            f"CP{prefix} {node} 0 {self.c:.9g}",
        ]


def tank_equivalent(t: TankSource) -> TankEquivalent:
    w = 2 * math.pi * t.f_res
    return TankEquivalent(r_p=t.q * w * t.l_t, l=t.l_t, c=1.0 / (w * w * t.l_t), drive=t.drive)


@dataclass(frozen=True)
class MatchDesign:
    """Lossless low-pass L-section: series L toward the low side, shunt C across the high side."""

    r_source: float
    r_load: float
    f: float
    series_l: float
    shunt_c: float
    q_match: float

    @property
    def shunt_at_source(self) -> bool:
        return self.r_source > self.r_load

    def input_impedance(self, f: float | None = None) -> complex:
        """Impedance seen from the source terminals with ``r_load`` attached."""
        w = 2 * math.pi * (self.f if f is None else f)
        zs = 1j * w * self.series_l
        yp = 1j * w * self.shunt_c
        if self.shunt_at_source:
            return 1.0 / (yp + 1.0 / (zs + self.r_load))
        return zs + 1.0 / (yp + 1.0 / self.r_load)

    def lines(self, n_source: str, n_load: str, tag: str) -> list[str]:
        """Netlist fragment between ``n_source`` and ``n_load``."""
        shunt_node = n_source if self.shunt_at_source else n_load
        return [
            f"L{tag} {n_source} {n_load} {self.series_l:.9g}",
            f"C{tag} {shunt_node} 0 {self.shunt_c:.9g}",
        ]


def design_l_match(r_source: float, r_load: float, f: float) -> MatchDesign:
    """Single-frequency L-section matching ``r_load`` to ``r_source``."""
    if not (r_source > 0 and r_load > 0 and f > 0):
        raise ValueError("resistances and frequency must be positive")
    if r_source == r_load:
        raise ValueError("r_source equals r_load: nothing to match")
    r_hi, r_lo = max(r_source, r_load), min(r_source, r_load)
    q = math.sqrt(r_hi / r_lo - 1.0)
    w = 2 * math.pi * f
    x_series = q * r_lo
    x_shunt = r_hi / q
    return MatchDesign(r_source, r_load, f, x_series / w, 1.0 / (w * x_shunt), q)
