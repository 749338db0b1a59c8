"""CLI behavior: grammar, exit codes, report schema, determinism, TSV."""

import json
import subprocess
import sys

import pytest

from fqlab.cli import main, parse_dist
from fqlab.errors import ConfigError
from fqlab.field import FieldSpec


def run_cli(args, tmp_path=None):
    """Invoke the entry point in-process, capturing stdout."""
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


def payload(text):
    doc = json.loads(text)
    doc.pop("wall_time_ms")
    return doc


def test_parse_dist_grammar():
    assert parse_dist("uniform", 3).probs.tolist() == [1 / 3] * 3
    assert parse_dist("uniform-nonzero", 3).probs.tolist() == [0.0, 0.5, 0.5]
    assert parse_dist("point:2", 3).probs.tolist() == [0.0, 0.0, 1.0]
    assert parse_dist("0.5,0.25,0.25", 3).probs.tolist() == [0.5, 0.25, 0.25]
    with pytest.raises(ConfigError):
        parse_dist("0.5,0.25", 3)
    with pytest.raises(ConfigError):
        parse_dist("0.5,0.25,0.35", 3)
    with pytest.raises(ConfigError):
        parse_dist("point:x", 3)
    with pytest.raises(ConfigError):
        parse_dist("banana", 3)


def test_field_check_pass():
    code, out = run_cli(["field-check", "7"])
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "field-check"
    assert doc["results"]["axioms_ok"] is True
    assert doc["results"]["generator"] == 3


def test_field_check_counts_q13():
    code, out = run_cli(["field-check", "13"])
    assert code == 0
    assert json.loads(out)["results"]["inverse_checks"] == 13 * 12


def test_field_check_rejects_composite():
    code, _ = run_cli(["field-check", "4"])
    assert code == 2


def test_km_bounds_defaults_q3():
    code, out = run_cli(["km-bounds", "3"])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["H_X_given_Y"] == pytest.approx(2.584962500721156, abs=1e-9)
    assert res["H_Z_given_Y"] == pytest.approx(1.584962500721156, abs=1e-9)
    assert res["graph_complete"] is True
    assert res["max_line_intersections"] == 1


def test_km_bounds_b_one_coincide():
    code, out = run_cli(["km-bounds", "2", "--pb", "point:1", "--pc", "0.9,0.1"])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["H_X_given_Y"] == pytest.approx(res["H_Z_given_Y"], abs=1e-9)


def test_km_bounds_point_mass_c():
    code, out = run_cli(["km-bounds", "3", "--pc", "point:1"])
    assert code == 0
    assert json.loads(out)["results"]["H_Z_given_Y"] == pytest.approx(0.0, abs=1e-9)


def test_km_sim_classical():
    code, out = run_cli(["km-sim", "2", "12", "6", "--pz", "0.95,0.05",
                         "--trials", "300"])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["trials"] == 300
    assert res["rate_bits"] == pytest.approx(0.5)
    assert 0.0 <= res["error_rate"] <= 1.0


def test_km_sim_variants():
    for variant in ("centralized-b", "decentralized"):
        code, out = run_cli(["km-sim", "3", "8", "4", "--variant", variant,
                             "--pc", "0.85,0.15,0.0", "--trials", "200"])
        assert code == 0
        assert json.loads(out)["results"]["variant"] == variant


def test_km_sim_sweep_tsv():
    code, out = run_cli(["km-sim", "2", "12", "6", "--pz", "0.9,0.1",
                         "--trials", "150", "--sweep", "2,6,10"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "rate_bits\terror_rate"
    assert len(lines) == 4
    rates = [float(ln.split("\t")[0]) for ln in lines[1:]]
    assert rates == sorted(rates)
    code, _ = run_cli(["km-sim", "2", "12", "6", "--sweep", "2,banana"])
    assert code == 2


def test_km_sim_budget_exceeded():
    code, _ = run_cli(["km-sim", "2", "40", "2", "--pz", "0.9,0.1",
                       "--trials", "10", "--cap", "1024"])
    assert code == 3


def test_decompose_command(tmp_path):
    from fqlab.tables import sum3, sum_product

    sum_file = tmp_path / "sum.tbl"
    sum3(FieldSpec(3)).write(sum_file)
    code, out = run_cli(["decompose", str(sum_file)])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["decomposable"] is True
    assert res["g_table"] is not None
    assert res["g_invertible_in_first"] is True

    sp_file = tmp_path / "sp.tbl"
    sum_product(FieldSpec(3)).write(sp_file)
    code, out = run_cli(["decompose", str(sp_file)])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["decomposable"] is False
    assert res["witness"] is not None


def test_decompose_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.tbl"
    bad.write_text("3 3 3 -> 3\n0 1 zebra\n")
    code = main(["decompose", str(bad)])
    assert code == 2
    assert "line 2" in capsys.readouterr().err


def test_minent_exhaustive_q3():
    code, out = run_cli(["minent", "3"])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["H_min_bits"] == pytest.approx(2 / 3, abs=1e-9)
    assert res["quadratic_bits"] == pytest.approx(2 / 3, abs=1e-9)
    assert res["lower_bound_bits"] == pytest.approx(0.5849625007211562, abs=1e-9)
    assert res["upper_bound_bits"] == pytest.approx(0.8479969065549501, abs=1e-9)
    assert res["capacity_lb_bits"] == pytest.approx(0.9182958340544894, abs=1e-9)
    assert res["corollary_cap_bits"] == 1.0


def test_minent_methods():
    code, out = run_cli(["minent", "3", "--method", "quadratic"])
    assert code == 0
    assert json.loads(out)["results"]["H_min_bits"] == pytest.approx(2 / 3, abs=1e-9)
    code, out = run_cli(["minent", "3", "--method", "anneal", "--n", "2",
                         "--budget", "2000"])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["H_min_bits"] <= 2 / 3 + 1e-9
    code, _ = run_cli(["minent", "3", "--method", "exhaustive", "--n", "2"])
    assert code == 2


def test_minent_budget_exceeded():
    code, _ = run_cli(["minent", "11"])
    assert code == 3


def test_gp_eval_search_additive():
    code, out = run_cli(["gp-eval", "2", "--channel", "additive", "--restarts", "1"])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["objective_bits"] == pytest.approx(1.0, abs=1e-6)
    assert res["origin"] == "decomposition"


def test_gp_eval_design_file(tmp_path):
    design = {
        "pu_given_s1": [[0.5, 0.5], [0.5, 0.5]],
        "x_of_u_s1": [[0, 1], [1, 0]],
    }
    path = tmp_path / "design.json"
    path.write_text(json.dumps(design))
    code, out = run_cli(["gp-eval", "2", "--channel", "additive",
                         "--ps1", "uniform", "--design", str(path)])
    assert code == 0
    res = json.loads(out)["results"]
    assert res["origin"] == "design-file"
    assert res["objective_bits"] == pytest.approx(1.0, abs=1e-9)


def test_gp_eval_table_channel(tmp_path):
    from fqlab.tables import sum3

    path = tmp_path / "chan.tbl"
    sum3(FieldSpec(2)).write(path)
    code, out = run_cli(["gp-eval", "2", "--table", str(path), "--restarts", "1"])
    assert code == 0
    assert json.loads(out)["results"]["objective_bits"] == pytest.approx(1.0, abs=1e-6)


def test_out_flag(tmp_path):
    out_path = tmp_path / "r.json"
    code, out = run_cli(["field-check", "5", "--out", str(out_path)])
    assert code == 0
    assert out == ""
    assert json.loads(out_path.read_text())["results"]["q"] == 5


def test_reports_are_byte_identical_across_runs():
    cases = [
        ["field-check", "5"],
        ["km-bounds", "3", "--pb", "0,0.7,0.3"],
        ["km-sim", "2", "12", "6", "--pz", "0.9,0.1", "--trials", "200"],
        ["minent", "3"],
        ["gp-eval", "2", "--restarts", "2"],
    ]
    for args in cases:
        _, out1 = run_cli(args)
        _, out2 = run_cli(args)
        assert payload(out1) == payload(out2)
        # byte-level comparison after stripping the wall-time field
        from fqlab.reporting import canonical_json
        assert canonical_json(payload(out1)) == canonical_json(payload(out2))


def test_report_empty_dir(tmp_path):
    code, out = run_cli(["report", str(tmp_path)])
    assert code == 0
    assert out == "# fqlab report\nfile\tcommand\n"


def test_report_two_minent_runs_sorted_by_q(tmp_path):
    for q in (5, 3):
        main(["minent", str(q), "--out", str(tmp_path / f"minent-{q}.json")])
    code, out = run_cli(["report", str(tmp_path)])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# fqlab report"
    assert lines[1] == "# minent"
    header = lines[2].split("\t")
    assert header[0] == "file"
    qcol = header.index("q")
    rows = [ln.split("\t") for ln in lines[3:5]]
    assert [r[qcol] for r in rows] == ["3", "5"]


def test_report_mixed_commands_sectioned(tmp_path):
    main(["field-check", "5", "--out", str(tmp_path / "fc.json")])
    main(["minent", "3", "--out", str(tmp_path / "me.json")])
    code, out = run_cli(["report", str(tmp_path)])
    assert code == 0
    assert "# field-check" in out
    assert "# minent" in out
    assert out.index("# field-check") < out.index("# minent")


def test_report_rejects_non_report_json(tmp_path):
    (tmp_path / "junk.json").write_text("[1, 2, 3]")
    code, _ = run_cli(["report", str(tmp_path)])
    assert code == 2


def test_cli_entry_point_subprocess():
    proc = subprocess.run([sys.executable, "-m", "fqlab", "field-check", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["q"] == 3


def test_help_lists_defaults():
    with pytest.raises(SystemExit) as e:
        main(["minent", "--help"])
    assert e.value.code == 0
