import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryoamp.ac import (
    TankSource,
    UnconvergedOperatingPoint,
    analyze,
    design_l_match,
    find_peak,
    gains_at,
    linearize,
    log_frequencies,
    sweep_ac,
    tank_equivalent,
)
from cryoamp.dc import solve_op
from cryoamp.device import StatzParams, small_signal
from cryoamp.netlist import parse

RC = "V1 in 0 DC 0 AC 1\nR1 in out 1k\nC1 out 0 1n\n.probe in V(in) I(V1)\n.probe out V(out) I(C1)"


def lin_of(text, **kw):
    nl = parse(text)
    return linearize(nl, solve_op(nl), **kw)


def test_rc_corner():
    fc = 159154.943091895  # 1 / (2 pi R C)
    g = gains_at(lin_of(RC), fc)
    assert abs(g["gv_db"] - (-3.01029995663981)) < 0.01


def test_rc_sweep_shape():
    res = sweep_ac(lin_of(RC), 1e3, 1e7, 20)
    assert res.gv_db[0] == pytest.approx(0.0, abs=1e-3)
    assert np.all(np.diff(res.gv_db) < 0)
    # one pole: close to -20 dB per decade well above the corner
    assert res.gv_db[-1] - res.gv_db[-21] == pytest.approx(-20.0, abs=0.2)


def test_gain_identity_everywhere(amp_lin):
    res = sweep_ac(amp_lin, 100e6, 2e9, 100)
    assert np.max(np.abs(res.gp_db - res.gv_db - res.gi_db)) < 1e-6


def test_log_frequencies():
    f = log_frequencies(1e3, 1e6, 10)
    assert len(f) == 31
    assert f[0] == 1e3 and f[-1] == pytest.approx(1e6)
    with pytest.raises(ValueError):
        log_frequencies(0, 1e3, 10)


def test_cutoff_fet_has_no_gm():
    nl = parse(".model M STATZ beta=0.08 vto=-0.46 cin=1p rin=1e4\nV1 d 0 DC 0.1\nVG g 0 DC -0.6\nJ1 d g 0 M")
    op = solve_op(nl)
    assert op.fets["J1"].g_m == 0.0
    lin = linearize(nl, op)
    assert lin.gm == {"J1": 0.0}


def test_gm_equals_small_signal(amp, amp_op, amp_lin):
    p = amp.models["MGF4937"]
    b = amp_op.fets["J1"]
    assert b.g_m == small_signal(p, b.u_gs, b.u_ds).g_m
    assert amp_lin.gm == {k: x.g_m for k, x in amp_op.fets.items()}


def test_resistor_only_linearization_is_identity():
    text = "V1 a 0 DC 1 AC 1\nR1 a b 1k\nR2 b 0 3k"
    nl = parse(text)
    op = solve_op(nl)
    lin = linearize(nl, op)
    x = lin.solve(1e3)
    assert lin.voltage(x, "b") == pytest.approx(0.75, abs=1e-15)
    assert np.allclose(lin.matrix(1.0), lin.matrix(1e9))


def test_unconverged_op_rejected(amp):
    from dataclasses import replace

    op = replace(solve_op(amp), converged=False)
    with pytest.raises(UnconvergedOperatingPoint):
        linearize(amp, op)


def test_singular_frequency_recorded():
    # a series L-C with nothing else across the pair is singular exactly at resonance
    text = "I1 0 a DC 0 AC 1\nL1 a b 1u\nC1 b 0 1n\nR1 a 0 1k\n.probe in V(a) I(R1)\n.probe out V(b) I(C1)"
    lin = lin_of(text)
    res = analyze(lin, [1e6, 5032921.210448704, 1e7])
    assert all(math.isfinite(v) for v in (res.gv_db[0], res.gv_db[2]))


def test_reciprocity():
    # passive ladder: transfer impedance V2/I1 == V1/I2
    base = "R1 a 0 1k\nL1 a b 1u\nC1 b 0 10p\nR2 b c 330\nC2 c 0 22p\nR3 c 0 2k\n"
    f = 17e6
    l1 = lin_of(base + "I1 0 a DC 0 AC 1")
    x1 = l1.solve(f)
    l2 = lin_of(base + "I1 0 c DC 0 AC 1")
    x2 = l2.solve(f)
    assert l1.voltage(x1, "c") == pytest.approx(l2.voltage(x2, "a"), rel=1e-12)


def test_passivity_without_gm(amp, amp_op):
    lin = linearize(amp, amp_op, transconductance=False)
    res = sweep_ac(lin, 100e6, 2e9, 100)
    assert np.nanmax(res.gp_db) <= 0.0


def test_find_peak_parabola():
    f = np.logspace(0, 2, 41)
    g = -((np.log10(f) - 1.0123) ** 2) * 30
    pk = find_peak(f, g)
    assert pk.f_peak == pytest.approx(10**1.0123, rel=1e-9)
    assert pk.g_p_peak == pytest.approx(0.0, abs=1e-9)
    half = math.sqrt(3 / 30)
    assert pk.bw_3db == pytest.approx(10 ** (1.0123 + half) - 10 ** (1.0123 - half), rel=5e-3)


def test_tank_equivalent_values():
    t = tank_equivalent(TankSource(450e6, 100, 2e-9))
    assert t.r_p == pytest.approx(565.486677646163, rel=1e-12)
    assert t.c == pytest.approx(6.25439405199616e-11, rel=1e-12)


def test_tank_resonance_is_real():
    t = tank_equivalent(TankSource(450e6, 100, 2e-9))
    z = t.impedance(450e6)
    assert z.real == pytest.approx(t.r_p, rel=1e-9)
    assert abs(z.imag) < 1e-9 * z.real


def test_lossless_tank_off_resonance_reactive():
    t = tank_equivalent(TankSource(450e6, 1e15, 2e-9))
    z = t.impedance(400e6)
    assert abs(z.real) < 1e-9 * abs(z.imag)


def test_tank_invalid():
    with pytest.raises(ValueError):
        TankSource(450e6, 0, 2e-9)


def test_match_5600_to_600():
    m = design_l_match(5600, 600, 450e6)
    assert m.q_match == pytest.approx(2.88675134594813, rel=1e-12)
    assert m.series_l == pytest.approx(6.12587661579769e-07, rel=1e-12)
    assert m.shunt_c == pytest.approx(1.82317756422550e-13, rel=1e-12)


def test_match_600_to_50():
    assert design_l_match(600, 50, 450e6).q_match == pytest.approx(3.31662479035540, rel=1e-12)


def test_match_equal_rejected():
    with pytest.raises(ValueError):
        design_l_match(50, 50, 1e9)


@settings(max_examples=100, deadline=None)
@given(st.floats(1, 1e5), st.floats(1, 1e5), st.floats(1e3, 1e11))
def test_match_hits_target(r_s, r_l, f):
    if abs(r_s - r_l) < 1e-6 * max(r_s, r_l):
        return
    m = design_l_match(r_s, r_l, f)
    z = m.input_impedance()
    assert abs(z - r_s) < 0.01 * r_s


def test_match_in_circuit():
    m = design_l_match(5600, 600, 450e6)
    text = "\n".join(["I1 0 src DC 0 AC 1", *m.lines("src", "load", "M"), "RL load 0 600",
                      ".probe in V(src) I(LM)", ".probe out V(load) I(RL)"])
    lin = lin_of(text)
    x = lin.solve(450e6)
    assert abs(lin.voltage(x, "src") - 5600) < 56


def test_amp_gains_at_450(amp_lin):
    g = gains_at(amp_lin, 450e6)
    assert g["gv_db"] == pytest.approx(-6.0, abs=3)
    assert g["gi_db"] == pytest.approx(21.0, abs=3)
    assert g["gp_db"] == pytest.approx(15.0, abs=3)


def test_amp_narrow_band(amp_lin):
    g0 = gains_at(amp_lin, 450e6)["gp_db"]
    assert g0 - gains_at(amp_lin, 225e6)["gp_db"] >= 6
    assert g0 - gains_at(amp_lin, 900e6)["gp_db"] >= 6


def test_amp_peak_has_bandwidth(amp_lin):
    res = sweep_ac(amp_lin, 100e6, 2e9, 400)
    assert res.peak.bw_3db > 0
    assert res.peak.f_peak == pytest.approx(450e6, rel=0.02)


def test_amp_gains_independent_of_tank_loss(amp):
    a = gains_at(linearize(amp, solve_op(amp)), 450e6)
    nl = amp.with_value("RP", 5600)
    b = gains_at(linearize(nl, solve_op(nl)), 450e6)
    for k in a:
        assert a[k] == pytest.approx(b[k], abs=1e-9)


def test_input_port_impedance(amp_lin):
    x = amp_lin.solve(450e6)
    z = amp_lin.voltage(x, "tank") / amp_lin.current(x, "L2", 450e6)
    assert abs(z) == pytest.approx(1120, rel=0.02)


def test_gate_capacitance_reactance():
    p = StatzParams(0.08, -0.46, c_in=0.59e-12, r_in=30e3)
    assert 1 / (2 * math.pi * 450e6 * p.c_in) == pytest.approx(600, rel=0.01)
