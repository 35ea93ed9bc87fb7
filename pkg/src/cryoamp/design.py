"""Generator for the shipped two-stage amplifier netlist.

Every element value is derived here from the device model and the design
targets; the generated deck carries one comment per derived value.

Topology per stage: grounded-gate self-bias (source resistor bypassed at RF),
drain fed from the supply through a resistor, low-pass L-sections between
the tank and gate 1, drain 1 and gate 2, and drain 2 and the 50 Ohm load.
The gate capacitance sits in parallel with each section's shunt capacitor;
when it exceeds the required value the difference is tuned out with a shunt
inductor, which also returns the gate to ground at DC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from cryoamp.ac import MatchDesign, TankSource, design_l_match, tank_equivalent
from cryoamp.dc import derive_bias_resistor, derive_drain_resistor, gate_voltage_for
from cryoamp.device import StatzParams, small_signal


@dataclass(frozen=True)
class AmplifierSpec:
    model: StatzParams = field(
        default_factory=lambda: StatzParams(
            beta=0.08, u_t=-0.46, lam=0.0, alpha=2.0, c_in=0.59e-12, r_in=30e3
        )
    )
    model_name: str = "MGF4937"
    supply: float = 0.44  # V
    u_ds: float = 0.030  # V
    i_d: float = 33.6e-6  # A
    f0: float = 450e6  # Hz
    # tank node impedance presented by the input section; 20 log10(1120/50) = 27 dB = G_I - G_V
    r_in_port: float = 1120.0  # Ohm
    r_term: float = 50.0  # Ohm
    tank: TankSource = field(default_factory=lambda: TankSource(f_res=450e6, q=100.0, l_t=2e-9))
    c_bypass: float = 1e-9  # F
    c_block: float = 1e-9  # F
    drive: float = 1e-3  # V


def _shunt_with_gate(c_needed: float, c_gate: float, f: float) -> tuple[str, float]:
    """Element realising shunt capacitance ``c_needed`` given ``c_gate`` already present."""
    extra = c_needed - c_gate
    w = 2 * math.pi * f
    if extra >= 0:
        return "C", extra
    return "L", 1.0 / (w * w * -extra)


@dataclass
class AmplifierDesign:
    spec: AmplifierSpec
    r_source: float
    r_drain: float
    u_gs: float
    g_m: float
    g_ds: float
    r_out: float
    input_match: MatchDesign
    interstage: MatchDesign
    output_match: MatchDesign

    def netlist_text(self) -> str:
        s = self.spec
        p = s.model
        f0 = s.f0
        tank = tank_equivalent(s.tank)
        k_in, v_in = _shunt_with_gate(self.input_match.shunt_c, p.c_in, f0)
        k_is, v_is = _shunt_with_gate(self.interstage.shunt_c, p.c_in, f0)
        w = 2 * math.pi * f0
        lines = [
            "* two-stage unsaturated HEMT amplifier, 450 MHz, high-impedance tank source",
            "* generated by cryoamp.design; every value below is derived, see comments",
            f"* model: beta, vto from the I-V fit; cin gives |Z_gate| = {1 / (w * p.c_in):.0f} Ohm at {f0 / 1e6:.0f} MHz",
            p.model_line(s.model_name),
            "*",
            f"* supply V1 = {s.supply} V, target point u_ds = {s.u_ds * 1e3:.1f} mV, i_d = {s.i_d * 1e6:.1f} uA",
            f"V1 vdd 0 DC {s.supply:.9g}",
            "*",
            f"* SQUID tank: f_res = {s.tank.f_res / 1e6:.0f} MHz, Q = {s.tank.q:g}, L_T = {s.tank.l_t:.3g} H",
            f"*   R_p = Q w L_T = {tank.r_p:.1f} Ohm, C_T = 1/(w^2 L_T); driven by V2 through R_p",
            f"V2 drv 0 DC 0 AC {s.drive:.9g}",
            f"RP drv tank {tank.r_p:.9g}",
            f"LT tank 0 {tank.l:.9g}",
            f"CT tank 0 {tank.c:.9g}",
            "*",
            f"* input L-section {s.r_in_port:g} Ohm -> r_in = {p.r_in:g} Ohm (q = {self.input_match.q_match:.3f})",
            f"*   series L2 = {self.input_match.series_l:.4g} H; shunt C = {self.input_match.shunt_c:.4g} F"
            f" less cin = {p.c_in:.3g} F -> {'L3 tunes out' if k_in == 'L' else 'C3 adds'} the difference;"
            " DC block CB0",
            f"CB0 tank x0 {s.c_block:.9g}",
            f"L2 x0 g1 {self.input_match.series_l:.9g}",
            f"{k_in}3 g1 0 {v_in:.9g}",
            "*",
            f"* stage 1: source self-bias R2 = -u_gs/i_d with u_gs = {self.u_gs:.4f} V",
            f"*   drain feed RD1 = (V1 - u_ds - i_d R2)/i_d",
            f"J1 d1 g1 s1 {s.model_name}",
            f"R2 s1 0 {self.r_source:.9g}",
            f"CS1 s1 0 {s.c_bypass:.9g}",
            f"RD1 vdd d1 {self.r_drain:.9g}",
            "*",
            f"* interstage L-section r_ds || RD = {self.r_out:.1f} Ohm -> r_in = {p.r_in:g} Ohm"
            f" (q = {self.interstage.q_match:.3f}), DC block CB1",
            f"CB1 d1 x1 {s.c_block:.9g}",
            f"L4 x1 g2 {self.interstage.series_l:.9g}",
            f"{k_is}5 g2 0 {v_is:.9g}",
            "*",
            "* stage 2: same bias network, R3 = R2",
            f"J2 d2 g2 s2 {s.model_name}",
            f"R3 s2 0 {self.r_source:.9g}",
            f"CS2 s2 0 {s.c_bypass:.9g}",
            f"RD2 vdd d2 {self.r_drain:.9g}",
            "*",
            f"* output L-section {self.r_out:.1f} Ohm -> {s.r_term:g} Ohm (q = {self.output_match.q_match:.3f})",
            f"C7 d2 0 {self.output_match.shunt_c:.9g}",
            f"CB2 d2 x2 {s.c_block:.9g}",
            f"L7 x2 out {self.output_match.series_l:.9g}",
            f"RL out 0 {s.r_term:.9g}",
            "*",
            ".op",
            ".dc V1 0 0.8 0.01",
            ".ac dec 200 100meg 2g",
            ".probe in V(tank) I(L2)",
            ".probe out V(out) I(RL)",
            ".end",
        ]
        return "\n".join(lines) + "\n"


def design_amplifier(spec: AmplifierSpec | None = None) -> AmplifierDesign:
    s = spec or AmplifierSpec()
    p = s.model
    r_source = derive_bias_resistor(p, s.u_ds, s.i_d)
    r_drain = derive_drain_resistor(s.supply, s.u_ds, s.i_d, r_source)
    u_gs = gate_voltage_for(p, s.u_ds, s.i_d)
    ss = small_signal(p, u_gs, s.u_ds)
    r_out = 1.0 / (ss.g_ds + 1.0 / r_drain)
    return AmplifierDesign(
        spec=s,
        r_source=r_source,
        r_drain=r_drain,
        u_gs=u_gs,
        g_m=ss.g_m,
        g_ds=ss.g_ds,
        r_out=r_out,
        input_match=design_l_match(s.r_in_port, p.r_in, s.f0),
        interstage=design_l_match(r_out, p.r_in, s.f0),
        output_match=design_l_match(r_out, s.r_term, s.f0),
    )
