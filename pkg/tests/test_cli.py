import csv
import io
import json

import pytest

from diracconf.cli import RunConfig, SweepConfig, AxisConfig, ConfigError, main, parse_config, run_sweep


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "argv,code",
    [
        (("classify", "--lam1", "0.6"), 0),
        (("classify", "--lam1", "0.3"), 1),
        (("classify", "--lam0", "1.0"), 1),
        (("classify", "--lam1", "0.5", "--method", "numeric"), 2),
        (("certify", "--theorem", "td1s", "--mu", "0", "--lam", "0.5"), 0),
        (("certify", "--theorem", "td1s", "--mu", "0", "--lam", "0.4"), 1),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_classify_json_mirrors_report(capsys):
    code, out, _ = run(capsys, "classify", "--lam1", "0.6", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["verdict"] == "ESA"
    assert data["report"]["tag"] == "P:M(ii)"
    assert [e["endpoint"] for e in data["report"]["endpoints"]] == ["a", "b"]


def test_unknown_config_key_reports_path(tmp_path, capsys):
    p = tmp_path / "c.toml"
    p.write_text("[numerics]\ndelta_mn = 1e-6\n")
    code, _, err = run(capsys, "classify", "--config", str(p))
    assert code == 3
    assert "numerics.delta_mn" in err


def test_toml_syntax_error_reports_position(tmp_path, capsys):
    p = tmp_path / "c.toml"
    p.write_text("[numerics]\ntol = = 1\n")
    code, _, err = run(capsys, "classify", "--config", str(p))
    assert code == 3
    assert "line 2" in err


def test_config_type_checked():
    with pytest.raises(ConfigError, match="numerics.jobs"):
        parse_config("[numerics]\njobs = 'many'\n")
    with pytest.raises(ConfigError, match="problem.v1.shape"):
        parse_config("[problem.v1]\nshape = 'power'\n")


def test_config_problem_tables(tmp_path, capsys):
    p = tmp_path / "c.toml"
    p.write_text('[problem.v1]\nkind = "power"\nparams = [0.7, 1.0]\nends = "both"\n')
    assert run(capsys, "classify", "--config", str(p))[0] == 0
    p.write_text('[problem.v1]\nkind = "power"\nparams = [0.7, 1.0]\nends = "a"\n')
    assert run(capsys, "classify", "--config", str(p))[0] == 1


def test_sweep_rejects_three_axes(capsys):
    code, _, err = run(capsys, "sweep", "--axis", "lam1:0:1:0.5", "--axis", "lam0:0:1:0.5", "--axis", "lam3:0:1:0.5")
    assert code == 3
    assert "axes" in err


def test_sweep_rejects_mixed_families(capsys):
    assert run(capsys, "sweep", "--axis", "lam1:0:1:0.5", "--axis", "lam_e:0:1:0.5")[0] == 3


def sweep_csv(capsys, *extra):
    code, out, _ = run(capsys, "sweep", "--axis", "lam1:0.3:0.7:0.1", "--axis", "lam3:0:0.2:0.1", *extra)
    assert code == 0
    return out


def test_sweep_csv_shape_and_determinism(capsys):
    a = sweep_csv(capsys, "--jobs", "1")
    b = sweep_csv(capsys, "--jobs", "2")
    assert a == b
    rows = list(csv.reader(io.StringIO(a)))
    assert rows[0] == ["param1", "param2", "verdict", "tag", "margin"]
    assert len(rows) == 1 + 5 * 3
    assert [r[:2] for r in rows[1:4]] == [["0.3", "0"], ["0.3", "0.1"], ["0.3", "0.2"]]


def test_sweep_verdicts_follow_margin(capsys):
    rows = list(csv.DictReader(io.StringIO(sweep_csv(capsys))))
    for r in rows:
        m = float(r["margin"])
        if abs(m) > 1e-12:
            assert r["verdict"] == ("ESA" if m > 0 else "NotESA")


def test_boundary_cells_are_exactly_margin_flagged():
    cfg = RunConfig()
    cfg.numerics.jobs = 1
    cfg.sweep = SweepConfig(axes=[AxisConfig("lam1", 0.40, 0.60, 0.05)], method="numeric")
    res = run_sweep(cfg)
    from diracconf.classifier import esa_verdict_1d
    from diracconf.cli import smf_problem

    for cell in res.cells:
        v = esa_verdict_1d(smf_problem(0.0, cell.params[0], 0.0), "numeric", cfg.numerics.delta_min,
                           cfg.numerics.delta0, cfg.numerics.tol)
        assert (cell.verdict == "Boundary") == v.margin_flag
    assert any(c.verdict == "Boundary" for c in res.cells)


def test_em_sweep_spot_check_json(capsys, tmp_path):
    out_csv = tmp_path / "em.csv"
    code, out, _ = run(capsys, "sweep", "--axis", "lam_m:0:1:0.25", "--axis", "lam_e:0:1:0.25",
                       "--numeric-cells", "3", "--seed", "7", "--out", str(out_csv), "--json")
    data = json.loads(out)
    assert code == 0
    assert data["model"] == "em"
    assert len(data["cells"]) == 25
    assert data["spot_check"]["total"] == 3
    assert out_csv.read_text().startswith("param1,param2,verdict,tag,margin")


def test_evolve_writes_csv(capsys, tmp_path):
    out = tmp_path / "ev.csv"
    code, text, _ = run(capsys, "evolve", "--lam", "1", "--T", "0.05", "--N", "256", "--out", str(out))
    assert code == 0
    assert "unitarity: pass" in text
    assert out.read_text().splitlines()[0] == "t,norm,band_prob,flux_left,flux_right,cut_amp"


def test_fibers_report_failing_fiber(capsys):
    code, out, _ = run(capsys, "fibers", "--field", "pcm", "--param", "0.25", "--j-range", "2", "--json")
    data = json.loads(out)
    assert code == 1
    assert data["failing_fiber"] == -1
    assert data["t_m2"]["ok"] is False


def test_certify_tsh_exit_codes(capsys):
    assert run(capsys, "certify", "--theorem", "tsh", "--domain", "interval", "--lam", "0.5")[0] == 0
    assert run(capsys, "certify", "--theorem", "tsh", "--domain", "interval", "--lam", "0.4")[0] == 1
