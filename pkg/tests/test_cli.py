import argparse
import csv
import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from efros import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


# eval ------------------------------------------------------------------------------


def test_eval_stable_density_example(capsys):
    code, out, _ = run(["eval", "f", "--nu", "0.5", "--mu", "0", "--t", "1"], capsys)
    assert code == 0
    (row,) = rows_of(out)
    assert list(row) == list(cli.EVAL_COLUMNS)
    assert float(row["value"]) == pytest.approx(0.2196956447, abs=1e-10)
    assert row["method"] == "closed_form"


def test_eval_mittag_leffler_exponential_json(capsys):
    code, out, _ = run(["eval", "mlf", "--alpha", "1", "--beta", "1", "--z", "1", "--format", "json"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(math.e, rel=1e-15)
    assert rec["function"] == "mlf"


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["eval", "volterra_nu", "--t", "1"], 2.2665345076998493),
        (["eval", "bessel_k", "--order", "0.5", "--z", "1"], math.sqrt(math.pi / 2) * math.exp(-1)),
        (["eval", "mainardi_m", "--nu", "0.5", "--t", "1"], math.exp(-0.25) / math.sqrt(math.pi)),
        (["eval", "wright", "--lam", "0", "--mu", "1", "--z", "2"], math.exp(2)),
    ],
)
def test_eval_special_functions(argv, expected, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert float(rows_of(out)[0]["value"]) == pytest.approx(expected, rel=1e-10)


def test_eval_methods_agree(capsys):
    values = {}
    for method in ("auto", "stankovic", "contour", "series", "finite", "laplace"):
        code, out, _ = run(["eval", "f", "--nu", "0.4", "--mu", "0", "--t", "2", "--method", method], capsys)
        assert code == 0, method
        values[method] = float(rows_of(out)[0]["value"])
    ref = values["auto"]
    assert all(v == pytest.approx(ref, rel=1e-8) for v in values.values())


def test_eval_domain_violation_exits_2(capsys):
    code, _, err = run(["eval", "f", "--nu", "1.5", "--mu", "0", "--t", "1"], capsys)
    assert code == 2
    assert "0 < nu < 1" in err


def test_eval_missing_argument_exits_2(capsys):
    code, _, err = run(["eval", "f", "--nu", "0.5", "--mu", "0"], capsys)
    assert code == 2
    assert "--t" in err


def test_unknown_subcommand_exits_2(capsys):
    assert run(["frobnicate"], capsys)[0] == 2


def test_numerical_failure_exits_3(capsys):
    code, _, err = run(["eval", "f", "--nu", "0.9", "--mu", "0", "--t", "0.1", "--method", "stankovic"], capsys)
    assert code == 3
    assert "numerical failure" in err


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "efros.cli", "eval", "f", "--nu", "0.5", "--mu", "0.5", "--t", "4"],
        capture_output=True,
        text=True,
        check=True,
    )
    value = float(rows_of(proc.stdout)[0]["value"])
    assert value == pytest.approx(math.exp(-1 / 16) / math.sqrt(4 * math.pi), rel=1e-14)


# tabulate ------------------------------------------------------------------------------


def test_tabulate_two_points_are_the_endpoints(capsys):
    code, out, _ = run(["tabulate", "f", "--nu", "0.5", "--mu", "0", "--t-min", "0.3", "--t-max", "7", "--points", "2"], capsys)
    assert code == 0
    rows = rows_of(out)
    assert [float(r["t"]) for r in rows] == [0.3, 7.0]


def test_tabulate_log_grid_is_positive(capsys):
    argv = ["tabulate", "f", "--nu", "0.5", "--mu", "0", "--t-min", "0.1", "--t-max", "10", "--points", "50", "--spacing", "log"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 50
    assert all(float(r["value"]) > 0 for r in rows)
    ts = [float(r["t"]) for r in rows]
    assert ts == sorted(ts)


def test_tabulate_is_continuous_across_method_switch(capsys):
    argv = ["tabulate", "f", "--nu", "0.6", "--mu", "0.25", "--t-min", "0.02", "--t-max", "2", "--points", "60", "--spacing", "log"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    rows = rows_of(out)
    methods = [r["method"] for r in rows]
    seams = [k for k in range(1, len(rows)) if methods[k] != methods[k - 1]]
    assert seams, f"expected a method change, got {set(methods)}"
    for k in seams:
        for j in (k - 1, k):
            t = float(rows[j]["t"])
            other = cli.evaluate("f", {"nu": 0.6, "mu": 0.25}, t, "contour")["value"]
            assert float(rows[j]["value"]) == pytest.approx(other, rel=1e-6)


def test_tabulate_rejects_bad_ranges(capsys):
    base = ["tabulate", "f", "--nu", "0.5", "--mu", "0"]
    assert run(base + ["--t-min", "2", "--t-max", "1"], capsys)[0] == 2
    assert run(base + ["--t-min", "1", "--t-max", "2", "--points", "1"], capsys)[0] == 2
    assert run(base + ["--t-min", "0", "--t-max", "2", "--spacing", "log"], capsys)[0] == 2


def test_tabulate_thread_count_does_not_change_output(capsys):
    argv = ["tabulate", "f", "--nu", "0.3", "--mu", "0.5", "--t-min", "0.05", "--t-max", "5", "--points", "12"]
    outs = [run(argv + ["--threads", n], capsys)[1] for n in ("1", "3")]
    assert outs[0] == outs[1]


# verify, catalog, selftest --------------------------------------------------------------


def test_verify_single_identity(capsys, tmp_path):
    target = tmp_path / "id01.csv"
    code, out, _ = run(["verify", "--identity", "ID-01", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    rows = rows_of(target.read_text())
    assert len(rows) >= 3
    assert all(r["passed"] == "true" and r["id"] == "ID-01" for r in rows)


def test_verify_unknown_identity_exits_2(capsys):
    assert run(["verify", "--identity", "ID-99"], capsys)[0] == 2


def test_verify_failure_exits_1_and_still_reports(capsys):
    code, out, _ = run(["verify", "--identity", "ID-05", "--tol", "1e-17", "--format", "json"], capsys)
    assert code == 1
    (report,) = json.loads(out)
    assert report["passed"] is False and report["points"]


def test_catalog_lists_24_identities(capsys):
    code, out, _ = run(["catalog"], capsys)
    assert code == 0
    assert len(json.loads(out)) == 24


def test_selftest_passes_with_default_and_loose_tolerance(capsys):
    for extra in ([], ["--rel-tol", "1e-3"]):
        code, out, _ = run(["selftest"] + extra, capsys)
        assert code == 0, out
        assert all(r["passed"] == "true" for r in rows_of(out))


def test_selftest_reports_noise_floor_failures(capsys):
    code, out, _ = run(["selftest", "--rel-tol", "1e-14"], capsys)
    assert code == 1
    assert any(r["passed"] == "false" for r in rows_of(out))


# configuration and formatting ------------------------------------------------------------


def _ns(**kw):
    base = {"threads": None, "rel_tol": None, "abs_tol": None, "format": None, "out": None, "config": None}
    base.update(kw)
    return argparse.Namespace(**base)


def test_config_precedence(tmp_path):
    cfg = tmp_path / "efros.conf"
    cfg.write_text("# defaults\nthreads = 3\nrel-tol = 1e-9\nformat = json\n")
    assert cli.resolve_config(_ns(config=str(cfg)), environ={}).threads == 3
    assert cli.resolve_config(_ns(config=str(cfg)), environ={"EFROS_THREADS": "5"}).threads == 5
    conf = cli.resolve_config(_ns(config=str(cfg), threads=7), environ={"EFROS_THREADS": "5"})
    assert conf.threads == 7 and conf.rel_tol == 1e-9 and conf.output_format == "json"
    assert cli.resolve_config(_ns(), environ={}) == cli.RunConfig()


def test_config_rejects_bad_input(tmp_path):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("colour = blue\n")
    with pytest.raises(cli.UsageError):
        cli.resolve_config(_ns(config=str(cfg)), environ={})
    with pytest.raises(cli.UsageError):
        cli.resolve_config(_ns(threads=0), environ={})
    with pytest.raises(cli.UsageError):
        cli.resolve_config(_ns(), environ={"EFROS_THREADS": "many"})


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_numbers_round_trip_through_text(x):
    assert float(cli.fmt_number(x)) == x


def test_special_number_text():
    assert cli.fmt_number(None) == ""
    assert cli.fmt_number(float("inf")) == "inf"
    assert cli.fmt_number(True) == "true"
    assert cli.fmt_number(3) == "3"


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=5))
def test_csv_round_trip(values):
    rows = [{"a": v, "b": "x"} for v in values]
    back = rows_of(cli.to_csv(rows, ("a", "b")))
    assert [float(r["a"]) for r in back] == values
