import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fedgen.cli import (
    ExperimentSpec,
    build_distribution,
    load_dataset_csv,
    main,
    parse_config,
    run_sweep,
)
from fedgen.errors import ParseError, TooFewRowsError, ValidationError
from fedgen.report import (
    CSV_HEADER,
    ResultsTable,
    SweepRow,
    emit_csv,
    emit_json,
    emit_svg_plot,
    results_from_json,
)
from fedgen.risks import MCEstimate

PAPER_CFG = """
n = 500
K = 10
d = 10
R = 1,2,5,10,25
eta = 0.01
seed = 42
dist = friedman1
loss = ols_regression
"""

TINY_CFG = """
n = 1
K = 2
R = 1
dist = finite
support = 0;1
loss = squared_location
eta = 0.5
seed = 0
M = 1000
"""


class TestParseConfig:
    def test_paper_defaults(self):
        spec = parse_config(PAPER_CFG)
        assert (spec.n, spec.K, spec.d) == (500, 10, 10)
        assert spec.R_list == [1, 2, 5, 10, 25]
        assert spec.eta == 0.01
        assert (spec.M, spec.N_test, spec.sigma_xi) == (1000, 1000, 0.0)

    def test_missing_eta_defaults(self):
        spec = parse_config(PAPER_CFG.replace("eta = 0.01\n", ""))
        assert spec.eta == 0.01

    def test_non_dividing_r(self):
        with pytest.raises(ValidationError) as err:
            parse_config(PAPER_CFG.replace("R = 1,2,5,10,25", "R = 3"))
        assert err.value.key == "R"

    def test_unknown_key(self):
        with pytest.raises(ValidationError) as err:
            parse_config(PAPER_CFG + "boost = 2\n")
        assert err.value.key == "boost"

    def test_syntax_error_carries_line_number(self):
        with pytest.raises(ParseError) as err:
            parse_config("n = 4\nwhat\n")
        assert err.value.line_no == 2

    def test_comments_and_sections_ignored(self):
        spec = parse_config("[run]\n" + PAPER_CFG + "# trailing comment\nM = 7 # inline\n")
        assert spec.M == 7

    def test_loss_dist_compatibility(self):
        with pytest.raises(ValidationError):
            parse_config(PAPER_CFG.replace("ols_regression", "squared_location"))

    def test_friedman_dim_pinned(self):
        with pytest.raises(ValidationError):
            parse_config(PAPER_CFG.replace("d = 10", "d = 5"))

    def test_finite_support_inference(self):
        spec = parse_config(TINY_CFG)
        assert spec.d == 1 and spec.support == [[0.0], [1.0]]

    def test_probs_length_checked(self):
        with pytest.raises(ValidationError):
            parse_config(TINY_CFG + "probs = 0.5,0.25,0.25\n")


class TestRunSweep:
    def test_singleton_dist_all_zero(self):
        spec = parse_config(
            "n = 2\nK = 2\nR = 1,2\ndist = finite\nsupport = 1\n"
            "loss = squared_location\neta = 0.2\nseed = 1\nM = 30\n"
        )
        table = run_sweep(spec, threads=1)
        for row in table.rows:
            assert row.gen.mean == 0.0
            assert row.bound_total.mean == 0.0

    def test_tiny_instance_close_to_quarter(self):
        spec = parse_config(TINY_CFG)
        table = run_sweep(spec, threads=1)
        (row,) = table.rows
        assert abs(row.gen.mean - 0.25) <= 3 * row.gen.se
        assert abs(row.bound_total.mean - 0.25) <= 3 * row.bound_total.se
        assert row.bound_term2 == 0.0

    def test_byte_identical_outputs(self):
        spec = parse_config(TINY_CFG.replace("M = 1000", "M = 80"))
        t1 = run_sweep(spec, threads=1)
        t2 = run_sweep(spec, threads=1)
        assert emit_csv(t1) == emit_csv(t2)
        assert emit_json(t1) == emit_json(t2)

    def test_threads_do_not_change_bytes(self):
        spec = parse_config(TINY_CFG.replace("M = 1000", "M = 60"))
        a = run_sweep(spec, threads=1)
        b = run_sweep(spec, threads=2)
        assert emit_csv(a) == emit_csv(b)
        assert emit_json(a) == emit_json(b)

    def test_gen_and_bound_modes_split_columns(self):
        spec = parse_config(TINY_CFG.replace("M = 1000", "M = 40"))
        g = run_sweep(spec, mode="gen", threads=1)
        b = run_sweep(spec, mode="bound", threads=1)
        s = run_sweep(spec, mode="sweep", threads=1)
        assert g.rows[0].bound_total.mean == 0.0
        assert b.rows[0].gen.mean == 0.0
        assert s.rows[0].gen == g.rows[0].gen
        assert s.rows[0].bound_total == b.rows[0].bound_total

    def test_noisy_config_rejected_for_bound(self):
        from fedgen.errors import NoisyRunUnsupportedError

        spec = parse_config(TINY_CFG.replace("M = 1000", "M = 10") + "sigma_xi = 0.1\n")
        with pytest.raises(NoisyRunUnsupportedError):
            run_sweep(spec, threads=1)
        table = run_sweep(spec, mode="gen", threads=1)  # gen-only path is fine
        assert len(table.rows) == 1


def make_table(rows=3):
    out = []
    for i in range(rows):
        out.append(
            SweepRow(
                R=i + 1,
                gen=MCEstimate(0.1 * (i + 1), 0.01, 10),
                bound_term1=0.2 * (i + 1),
                bound_term2=0.01 * i,
                bound_total=MCEstimate(0.2 * (i + 1) + 0.01 * i, 0.02, 10),
                emp_risk=1.0 - 0.1 * i,
                pop_risk=1.1,
                proxy_delta=0.05,
                seconds=0.0,
            )
        )
    return ResultsTable(tuple(out), {"seed": 1, "spec": {"n": 4}})


class TestEmitters:
    def test_csv_header_golden(self):
        assert CSV_HEADER == (
            "R,gen_mean,gen_se,bound_term1,bound_term2,bound_total,bound_se,"
            "emp_risk,pop_risk,proxy_delta,seconds"
        )
        text = emit_csv(make_table(1))
        assert text.splitlines()[0] == CSV_HEADER
        assert len(text.splitlines()) == 2

    def test_json_round_trip(self):
        table = make_table()
        assert results_from_json(emit_json(table)) == table

    def test_full_precision(self):
        table = ResultsTable(
            (SweepRow(1, MCEstimate(1 / 3, 1e-17, 3), 0.1, 0.0,
                      MCEstimate(0.1, 0.0, 3), 0.0, 0.0, 0.0, 0.0),),
            {},
        )
        line = emit_csv(table).splitlines()[1]
        assert "0.33333333333333331" in line

    def test_svg_structure(self):
        svg = emit_svg_plot(make_table(5))
        root = ET.fromstring(svg)  # well-formed XML
        assert root.tag.endswith("svg")
        polylines = svg.count("<polyline")
        polygons = svg.count("<polygon")
        assert (polylines, polygons) == (2, 1)

    def test_svg_y_axis_inverted_monotone(self):
        svg = emit_svg_plot(make_table(5))
        bound_line = [seg for seg in svg.splitlines() if "cc6677" in seg and "polyline" in seg][0]
        pts = bound_line.split('points="')[1].split('"')[0].split()
        ys = [float(p.split(",")[1]) for p in pts]
        # bound means increase with R, so screen y must strictly decrease
        assert all(a > b for a, b in zip(ys, ys[1:]))

    def test_svg_too_few_rows(self):
        with pytest.raises(TooFewRowsError):
            emit_svg_plot(make_table(1))


class TestDatasetCsv:
    def test_location_and_regression(self, tmp_path):
        loc = tmp_path / "loc.csv"
        loc.write_text("z1,z2\n0.0,1.0\n2.0,3.0\n")
        kind, feats, labels = load_dataset_csv(str(loc))
        assert kind == "location" and labels is None and feats.shape == (2, 2)

        reg = tmp_path / "reg.csv"
        reg.write_text("x1,x2,y\n0.0,1.0,2.0\n2.0,3.0,4.0\n")
        kind, feats, labels = load_dataset_csv(str(reg))
        assert kind == "regression" and labels.tolist() == [2.0, 4.0]

    def test_bad_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(ParseError):
            load_dataset_csv(str(bad))

    def test_bad_row_length(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("z1,z2\n1.0\n")
        with pytest.raises(ParseError) as err:
            load_dataset_csv(str(bad))
        assert err.value.line_no == 2

    def test_csv_dist_end_to_end(self, tmp_path):
        rng = np.random.default_rng(0)
        rows = ["z1"] + [f"{v:.6f}" for v in rng.normal(size=40)]
        (tmp_path / "pool.csv").write_text("\n".join(rows) + "\n")
        spec = parse_config(
            f"n = 2\nK = 2\nR = 1\ndist = csv\ncsv = {tmp_path / 'pool.csv'}\n"
            "loss = squared_location\nseed = 5\nM = 20\n"
        )
        mu = build_distribution(spec)
        assert mu.dim == 1
        table = run_sweep(spec, mode="gen", threads=1)
        assert len(table.rows) == 1


class TestMain:
    def test_sweep_writes_outputs(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(TINY_CFG.replace("M = 1000", "M = 40"))
        out = tmp_path / "r.csv"
        jsn = tmp_path / "r.json"
        code = main(["sweep", str(cfg), "--out", str(out), "--json", str(jsn)])
        assert code == 0
        assert out.read_text().startswith("R,gen_mean")
        assert results_from_json(jsn.read_text()).meta["seed"] == 0

    def test_seed_and_m_overrides(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(TINY_CFG.replace("M = 1000", "M = 40"))
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["sweep", str(cfg), "--out", str(a), "--seed", "9", "--m", "25"]) == 0
        assert main(["sweep", str(cfg), "--out", str(b), "--seed", "9", "--m", "25"]) == 0
        assert a.read_text() == b.read_text()

    def test_svg_output(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "n = 2\nK = 2\nR = 1,2\ndist = finite\nsupport = 0;1\n"
            "loss = squared_location\neta = 0.3\nseed = 2\nM = 30\n"
        )
        svg = tmp_path / "plot.svg"
        assert main(["sweep", str(cfg), "--out", str(tmp_path / "x.csv"), "--svg", str(svg)]) == 0
        ET.fromstring(svg.read_text())

    def test_config_error_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("n = 500\nK = 10\nR = 3\ndist = friedman1\nloss = ols_regression\n")
        assert main(["sweep", str(cfg)]) == 2

    def test_missing_file_exit_code(self):
        assert main(["sweep", "/definitely/not/here.cfg"]) == 3

    def test_ingest_csv(self, tmp_path, capsys):
        f = tmp_path / "d.csv"
        f.write_text("x1,y\n1.0,2.0\n3.0,4.0\n")
        assert main(["ingest-csv", str(f)]) == 0
        assert "regression" in capsys.readouterr().out
        bad = tmp_path / "bad.csv"
        bad.write_text("foo\n1\n")
        assert main(["ingest-csv", str(bad)]) == 2

    def test_verify_exit_codes(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "corollary_one_shot[hand-K2n1]" in out
        assert "lhs=+2.500000000000e-01" in out
        identities = [ln for ln in out.splitlines() if " identity " in ln]
        inequalities = [ln for ln in out.splitlines() if " inequality " in ln]
        assert len(identities) >= 6
        assert len(inequalities) >= 2
        assert main(["verify", "--perturb-aggregation", "1e-3"]) == 1
