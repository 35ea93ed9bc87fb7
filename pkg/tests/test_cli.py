import csv
import io
import json

import pytest

from cryoamp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_dc_op_divider(capsys):
    code, out, err = run(capsys, "dc", "divider.cir")
    assert code == 0
    r = rows(out)
    assert r[0] == ["v(in)", "v(mid)", "i(v1)"]
    assert r[1] == ["1", "0.5", "-0.0005"]
    assert len(r) == 2


def test_dc_sweep_columns(capsys):
    code, out, _ = run(capsys, "dc", "two_stage_amp.cir", "--sweep", "V1", "0", "0.8", "0.01")
    assert code == 0
    r = rows(out)
    assert r[0] == ["u_supply", "i_d", "u_ds", "p_hemt", "p_bias"]
    assert len(r) == 82
    at = next(x for x in r[1:] if float(x[0]) == pytest.approx(0.44))
    assert float(at[2]) == pytest.approx(0.030, rel=1e-6)


def test_missing_file(capsys):
    code, _, err = run(capsys, "dc", "does_not_exist.cir")
    assert code == 2
    assert "no such file" in err


def test_diagnostics_exit_2(tmp_path, capsys):
    bad = tmp_path / "loop.cir"
    bad.write_text("V1 a 0 1\nV2 a 0 2\nR1 a 0 1k\n")
    code, _, err = run(capsys, "dc", str(bad))
    assert code == 2
    assert "source loop" in err


def test_syntax_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cir"
    bad.write_text("R1 a 0 zz\n")
    code, _, err = run(capsys, "dc", str(bad))
    assert code == 2 and "line 1" in err


def test_nonconvergence_exit_3(capsys):
    code, _, _ = run(capsys, "dc", "two_stage_amp.cir", "--max-iter", "1")
    assert code == 3


def test_ac_gains_and_footer(capsys):
    code, out, err = run(capsys, "ac", "two_stage_amp.cir")
    assert code == 0
    r = rows(out)
    assert r[0] == ["f_hz", "gv_db", "gi_db", "gp_db"]
    for line in r[1:]:
        gv, gi, gp = map(float, line[1:])
        assert abs(gp - gv - gi) < 1e-6
    assert "450 MHz" in err and "G_P" in err


def test_ac_rc(capsys):
    code, out, err = run(capsys, "ac", "rc_lowpass.cir", "--report-f", "159154.943")
    assert code == 0
    assert "G_V = -3.01 dB" in err


def test_ac_passivity_flag(capsys):
    code, out, _ = run(capsys, "ac", "two_stage_amp.cir", "--no-gm", "--ppd", "50")
    assert max(float(x[3]) for x in rows(out)[1:]) <= 0


def test_fit_emits_model_line(capsys):
    code, out, err = run(capsys, "fit", "iv_synthetic.csv")
    assert code == 0
    assert ".model MGF4937 STATZ beta=" in err
    beta = float(rows(out)[1][0])
    assert beta == pytest.approx(0.08, rel=0.03)


def test_fit_degenerate(tmp_path, capsys):
    p = tmp_path / "one.csv"
    p.write_text("u_gs,u_ds,i_d\n-0.4,0.01,1e-6\n-0.4,0.02,2e-6\n-0.4,0.03,3e-6\n")
    code, _, err = run(capsys, "fit", str(p))
    assert code == 2 and "degenerate" in err


def test_spectrum_levels(capsys):
    code, out, err = run(capsys, "spectrum", "--params", "double_well_qubit.json", "--levels", "8")
    assert code == 0
    r = rows(out)
    assert r[0] == ["level", "energy_K", "energy_GHz", "flux_expect_phi0"]
    assert len(r) == 9
    assert "shallow" in err


def test_spectrum_potential(capsys):
    code, out, _ = run(capsys, "spectrum", "--potential", "--n", "101", "--quiet")
    assert rows(out)[0] == ["phi", "potential_K"]
    assert len(rows(out)) == 102


def test_spectrum_svg(capsys):
    code, out, _ = run(capsys, "spectrum", "--format", "svg", "--levels", "8", "--quiet")
    assert code == 0 and out.lstrip().startswith("<?xml")


def test_photons_table(capsys):
    code, out, err = run(capsys, "photons", "--table")
    assert code == 0
    assert "bandwidth" in err
    assert len(rows(out)) == 13


def test_photons_needs_args(capsys):
    code, _, _ = run(capsys, "photons")
    assert code == 2


def test_brightness(capsys):
    code, out, _ = run(capsys, "brightness", "1", "100", "-20")
    assert rows(out)[1][-1] == "2"


def test_match(capsys):
    code, out, err = run(capsys, "match", "5600", "600", "450e6")
    assert code == 0
    assert "LM src load" in err
    assert float(rows(out)[1][3]) == pytest.approx(2.88675135, rel=1e-8)


def test_match_equal(capsys):
    code, _, _ = run(capsys, "match", "50", "50", "1e9")
    assert code == 2


def test_svg_rejected_for_tables(capsys):
    code, _, _ = run(capsys, "brightness", "1", "1", "-20", "--format", "svg")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [["dc", "two_stage_amp.cir", "--sweep", "V1", "0.4", "0.5", "0.02"], ["photons", "--table"],
     ["spectrum", "--levels", "8"], ["match", "600", "50", "450e6"]],
)
def test_json_and_csv_agree(capsys, argv):
    _, out_csv, _ = run(capsys, *argv, "--quiet")
    _, out_json, _ = run(capsys, *argv, "--format", "json", "--quiet")
    table = rows(out_csv)
    doc = json.loads(out_json)
    assert doc["columns"] == table[0]
    for line, rec in zip(table[1:], doc["rows"]):
        for col, cell in zip(table[0], line):
            assert float(cell) == float(rec[col])


def test_deterministic(capsys):
    a = run(capsys, "ac", "two_stage_amp.cir", "--quiet")[1]
    b = run(capsys, "ac", "two_stage_amp.cir", "--quiet")[1]
    assert a == b


def test_out_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CRYOAMP_OUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "brightness", "1", "100", "-20", "--quiet")
    assert out == ""
    assert (tmp_path / "brightness.csv").read_text().startswith("t_g,")


def test_out_file(tmp_path, capsys):
    target = tmp_path / "sub" / "dc.svg"
    code, _, _ = run(capsys, "dc", "two_stage_amp.cir", "--sweep", "V1", "0", "0.8", "0.05",
                     "--format", "svg", "--out", str(target), "--quiet")
    assert code == 0 and target.read_text().lstrip().startswith("<?xml")
