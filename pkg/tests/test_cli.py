from __future__ import annotations

import re

import pytest

from leakline.cli import EXIT_NO_SIGNAL, EXIT_OK, EXIT_TOLERANCE, EXIT_VALIDATION, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def table_rows(out):
    rows = {}
    for line in out.strip().splitlines()[1:]:
        t, pin, pout = line.split("\t")
        rows[float(t)] = (float(pin), float(pout))
    return rows


def grab(pattern, text):
    m = re.search(pattern, text)
    assert m, f"{pattern!r} not found in:\n{text}"
    return float(m.group(1))


class TestSimulate:
    def test_table_mode_anchors(self, capsys, scenario_path):
        code, out, _ = run(capsys, "simulate", scenario_path("pipeline_a_start"))
        assert code == EXIT_OK
        rows = table_rows(out)
        assert rows[100.0][0] == pytest.approx(52.23, abs=0.02)
        assert rows[100.0][1] == pytest.approx(25.00, abs=0.02)
        assert rows[900.0][0] == pytest.approx(44.13, abs=0.02)

    def test_table_mode_line_b_end(self, capsys, scenario_path):
        code, out, _ = run(capsys, "simulate", scenario_path("pipeline_b_end"))
        assert code == EXIT_OK
        rows = table_rows(out)
        assert rows[60.0] == (pytest.approx(13.97, abs=0.02), pytest.approx(10.37, abs=0.02))

    def test_single_steady_row(self, capsys, scenario_path, tmp_path):
        src = scenario_path("pipeline_b_mid")
        dst = tmp_path / "steady.cfg"
        text = open(src).read().replace("t_start = 60", "t_start = 0") \
                               .replace("t_end = 600", "t_end = 0")
        dst.write_text(text)
        code, out, _ = run(capsys, "simulate", str(dst))
        assert code == EXIT_OK
        rows = table_rows(out)
        assert rows == {0.0: (14.00, 11.00)}

    def test_csv_mode_full_precision(self, capsys, scenario_path, tmp_path):
        out_path = tmp_path / "sim.csv"
        code, _, _ = run(capsys, "simulate", scenario_path("pipeline_b_mid"),
                         "--csv", "--out", str(out_path))
        assert code == EXIT_OK
        lines = out_path.read_text().splitlines()
        assert lines[0] == "t_seconds,p_inlet_pa,p_outlet_pa"
        assert len(lines) == 11
        assert "." in lines[1].split(",")[1]  # full precision, not table-rounded

    def test_byte_stable_output(self, capsys, scenario_path, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "simulate", scenario_path("pipeline_a_mid"), "--csv", "--out", str(p1))
        run(capsys, "simulate", scenario_path("pipeline_a_mid"), "--csv", "--out", str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_field_dump(self, capsys, scenario_path, tmp_path):
        field = tmp_path / "field.csv"
        code, _, _ = run(capsys, "simulate", scenario_path("pipeline_b_mid"),
                         "--field", str(field), "--field-points", "11")
        assert code == EXIT_OK
        lines = field.read_text().splitlines()
        assert lines[0] == "t_seconds,x_m,pressure_pa"
        assert len(lines) == 1 + 10 * 11

    def test_validation_error_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[pipeline]\np1 = 5\n")
        code, _, err = run(capsys, "simulate", str(bad))
        assert code == EXIT_VALIDATION
        assert "[pipeline]" in err


class TestLocate:
    def test_mid_leak_exact(self, capsys, scenario_path):
        code, out, _ = run(capsys, "locate", scenario_path("pipeline_b_mid"), "--at", "180")
        assert code == EXIT_OK
        assert grab(r"ell2_est = (\S+) m", out) == pytest.approx(1.50e4, abs=1.0)
        assert grab(r"rel_error_vs_true = (\S+)", out) == pytest.approx(0.0, abs=1e-6)
        assert "Accident" in out

    def test_mid_leak_time_independent(self, capsys, scenario_path):
        code, out, _ = run(capsys, "locate", scenario_path("pipeline_b_mid"), "--at", "60")
        assert code == EXIT_OK
        assert grab(r"ell2_est = (\S+) m", out) == pytest.approx(1.50e4, abs=1.0)

    def test_end_leak_within_len_fraction(self, capsys, scenario_path):
        code, out, _ = run(capsys, "locate", scenario_path("pipeline_a_end"),
                           "--at", "300", "--eps-meas", "1.0")
        assert code == EXIT_OK
        assert grab(r"ell2_est = (\S+) m", out) == pytest.approx(9.46e4, abs=0.01e4)
        assert grab(r"rel_error_vs_true = (\S+)", out) <= 0.04

    def test_observed_csv_reproduces_gauge_value(self, capsys, tmp_path):
        # gauge-resolution history of the near-outlet rupture on line A
        rows = [(300, 54.99e4, 19.30e4), (400, 54.97e4, 18.21e4)]
        path = tmp_path / "obs.csv"
        path.write_text("t_seconds,p_inlet_pa,p_outlet_pa\n" +
                        "\n".join(f"{t},{a:g},{b:g}" for t, a, b in rows) + "\n")
        code, out, _ = run(capsys, "locate", str(scenario_a_end_path()), "--at", "300",
                           "--observed", str(path))
        assert code == EXIT_OK
        assert grab(r"ell2_est = (\S+) m", out) == pytest.approx(9.45e4, abs=0.01e4)

    def test_undefined_ratio_exit_two(self, capsys, scenario_path):
        # full-precision outlet deviation at 300 s sits below the 100 Pa floor
        code, _, err = run(capsys, "locate", scenario_path("pipeline_a_start"), "--at", "300")
        assert code == EXIT_NO_SIGNAL
        assert "below measurability floor" in err

    def test_band_printed_when_available(self, capsys, scenario_path):
        code, out, _ = run(capsys, "locate", scenario_path("pipeline_b_start"), "--at", "120")
        assert code == EXIT_OK
        assert "band = (" in out


def scenario_a_end_path():
    from conftest import SCENARIO_DIR
    return SCENARIO_DIR / "pipeline_a_end.cfg"


class TestRoundTrip:
    @pytest.mark.parametrize("name,ell2,t_fix", [
        ("pipeline_a_start", 0.5e4, 300.0),
        ("pipeline_a_mid", 5e4, 300.0),
        ("pipeline_a_end", 9.5e4, 300.0),
        ("pipeline_b_mid", 1.5e4, 120.0),
        pytest.param("pipeline_b_start", 0.5e4, 120.0,
                     marks=pytest.mark.xfail(
                         strict=True,
                         reason="single-ratio inversion biased at this position/time; "
                                "error 7.8% of length, see acceptance notes")),
        pytest.param("pipeline_b_end", 2.5e4, 120.0,
                     marks=pytest.mark.xfail(
                         strict=True,
                         reason="mirror of pipeline_b_start; same bias")),
    ])
    def test_simulate_then_locate(self, capsys, scenario_path, tmp_path, name, ell2, t_fix):
        csv = tmp_path / "sim.csv"
        code, _, _ = run(capsys, "simulate", scenario_path(name), "--csv", "--out", str(csv))
        assert code == EXIT_OK
        code, out, _ = run(capsys, "locate", scenario_path(name), "--at", str(t_fix),
                           "--observed", str(csv), "--eps-meas", "1.0")
        assert code == EXIT_OK
        est = grab(r"ell2_est = (\S+) m", out)
        sc_length = 10e4 if name.startswith("pipeline_a") else 3e4
        assert abs(est - ell2) / sc_length <= 0.04


class TestCurves:
    def test_three_curves_mid_constant_one(self, capsys, scenario_path, tmp_path):
        out_path = tmp_path / "curves.csv"
        code, _, _ = run(capsys, "curves", scenario_path("pipeline_a_start"),
                         scenario_path("pipeline_a_mid"), scenario_path("pipeline_a_end"),
                         "--eps-meas", "1.0", "--out", str(out_path))
        assert code == EXIT_OK
        lines = out_path.read_text().splitlines()
        assert lines[0] == "scenario_id,t,p"
        mid = {float(t): v for sid, t, v in (l.split(",") for l in lines[1:])
               if sid == "pipeline_a_mid" and v}
        assert mid and all(abs(float(v) - 1.0) < 1e-6 for v in mid.values())

    def test_reciprocal_curves_multiply_to_one(self, capsys, scenario_path, tmp_path):
        out_path = tmp_path / "curves.csv"
        run(capsys, "curves", scenario_path("pipeline_b_start"),
            scenario_path("pipeline_b_end"), "--eps-meas", "1.0", "--out", str(out_path))
        values = {}
        for line in out_path.read_text().splitlines()[1:]:
            sid, t, v = line.split(",")
            if v:
                values.setdefault(float(t), {})[sid] = float(v)
        checked = 0
        for t, by_sid in values.items():
            if len(by_sid) == 2:
                product = by_sid["pipeline_b_start"] * by_sid["pipeline_b_end"]
                # CSV carries 9 significant digits, so allow that rounding
                assert product == pytest.approx(1.0, rel=1e-7)
                checked += 1
        assert checked >= 5

    def test_undefined_cells_empty(self, capsys, scenario_path, tmp_path):
        out_path = tmp_path / "curves.csv"
        run(capsys, "curves", scenario_path("pipeline_a_start"), "--out", str(out_path))
        first = out_path.read_text().splitlines()[1]
        assert first.endswith(",")  # outlet still quiet at t=100 -> empty cell

    def test_empty_scenario_set(self, capsys, tmp_path):
        out_path = tmp_path / "curves.csv"
        code, _, _ = run(capsys, "curves", "--out", str(out_path))
        assert code == EXIT_OK
        assert out_path.read_text() == "scenario_id,t,p\n"


class TestVerify:
    def test_default_grid_passes(self, capsys, scenario_path):
        code, out, _ = run(capsys, "verify", scenario_path("pipeline_a_start"),
                           "--nx", "500", "--t-end", "300", "--step", "100")
        assert code == EXIT_OK
        assert "PASS" in out

    def test_as_printed_breaches_tolerance(self, capsys, scenario_path):
        code, out, _ = run(capsys, "verify", scenario_path("pipeline_a_start"),
                           "--nx", "300", "--t-end", "50", "--step", "10",
                           "--variant", "as_printed")
        assert code == EXIT_TOLERANCE
        assert "FAIL" in out
        # the report surfaces the spurious start-up inlet offset at small t
        assert grab(r"inlet offset\s+: (\S+) Pa", out) == pytest.approx(15e4, rel=0.15)

    def test_unstable_dt_rejected_with_stable_value(self, capsys, scenario_path):
        code, _, err = run(capsys, "verify", scenario_path("pipeline_a_start"),
                           "--nx", "500", "--dt", "10.0", "--t-end", "300")
        assert code == EXIT_VALIDATION
        assert "need dt <=" in err

    def test_zero_leak_trivial_pass(self, capsys, scenario_path, tmp_path):
        text = open(scenario_path("pipeline_a_start")).read() \
            .replace("ell2 = 0.5e4", "ell2 = 0.5e4\ng_leak = 0")
        path = tmp_path / "quiet.cfg"
        path.write_text(text)
        code, out, _ = run(capsys, "verify", str(path), "--nx", "300", "--t-end", "100")
        assert code == EXIT_OK


class TestMonitorCommand:
    def test_bundled_replay_accident(self, capsys, scenario_path, replay_path, tmp_path):
        log = tmp_path / "events.log"
        code, out, _ = run(capsys, "monitor", scenario_path("pipeline_b_start"),
                           "--stream", replay_path("pipeline_b_start_leak"),
                           "--log", str(log))
        assert code == EXIT_OK
        assert re.search(r"^120\.000,Verdict,.*verdict=Accident", out, re.M)
        assert "PlanIssued" in out
        assert log.read_text().startswith("t,kind,payload\n")

    def test_flat_replay_no_verdict(self, capsys, scenario_path, replay_path):
        code, out, _ = run(capsys, "monitor", scenario_path("pipeline_b_start"),
                           "--stream", replay_path("pipeline_b_flat"))
        assert code == EXIT_OK
        assert "Verdict" not in out

    def test_malformed_csv_exit_one(self, capsys, scenario_path, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t_seconds,p_inlet_pa,p_outlet_pa\n0,140000,110000\nnope\n")
        code, _, err = run(capsys, "monitor", scenario_path("pipeline_b_start"),
                           "--stream", str(bad))
        assert code == EXIT_VALIDATION
        assert "line 3" in err


class TestUsageErrors:
    def test_unknown_variant_exit_one(self, capsys, scenario_path):
        code, _, err = run(capsys, "simulate", scenario_path("pipeline_a_start"),
                           "--variant", "bogus")
        assert code == EXIT_VALIDATION

    def test_missing_subcommand_argument(self, capsys):
        code, _, err = run(capsys, "locate")
        assert code == EXIT_VALIDATION
