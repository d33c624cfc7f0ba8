import json
import subprocess
import sys

import pytest

from roughideal import cli, experiment
from roughideal.errors import ConfigError
from roughideal.reporting import (MissingArtifactError, dumps, format_float,
                                  report_bundle, sha256_file)

FAST = {
    "density": {"set": "evens", "horizon": 2000},
    "limit-set": {"sequence": "sec2_example", "r": 1.0, "horizon": 4000,
                  "grid": {"lo": -2.0, "hi": 2.0, "step": 0.05}},
    "min-degree": {"sequence": "const_zero", "ideal": "fin",
                   "grid": {"lo": -1.0, "hi": 1.0, "step": 0.05}},
    "structure": {"sequence": "const_zero", "ideal": "fin", "r_grid": [0.5],
                  "grid": {"lo": -1.0, "hi": 1.0, "step": 0.05}},
    "cluster-set": {"sequence": "remark_4_3", "r_grid": [1.0], "horizon": 4000,
                    "grid": {"lo": -1.0, "hi": 2.0, "step": 0.1}},
    "repr-closed": {"F": [0.0, 1.0], "grid": {"lo": -1.0, "hi": 2.0, "step": 0.1},
                    "r_grid": [0.5], "eps_grid": [0.1, 0.05]},
    "lim-gamma-gap": {"r": 1.0},
    "korovkin-field": {"mode": "g", "j_list": 20, "grid": {"nodes": 21}},
    "korovkin-bound": {"f": "e2", "t_list": 16, "grid": {"nodes": 21}},
    "tachev": {"f": "e2", "t_list": [25, 100]},
    "adjudicate-5-3": {"j_list": 20, "grid": {"nodes": 21}},
}

THIRDS = {"sequence": {"kind": "expr", "expr": "where(t % 3 == 0, 1, 0)"},
          "thresholds": [0.2, 0.3], "bracket0": [0.0, 0.5], "horizon": 3000,
          "grid": {"lo": 0.0, "hi": 0.0, "step": 0.1}}


def _run(tmp_path, task, cfg, *extra, name="run"):
    cfg_path = tmp_path / f"{name}.cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / name
    code = cli.main([task, "--config", str(cfg_path), "--out", str(out), *extra])
    return code, out


def _stem(task):
    return task.replace("-", "_")


def test_fast_configs_cover_every_task():
    assert set(FAST) == set(experiment.TASKS)


@pytest.mark.parametrize("task", sorted(FAST))
def test_subcommand_writes_json_csv_and_index(tmp_path, task):
    code, out = _run(tmp_path, task, FAST[task])
    assert code == 0
    doc = json.loads((out / f"{_stem(task)}.json").read_text())
    assert doc["task"] == task and doc["status"] == "ok"
    header = (out / f"{_stem(task)}.csv").read_text().splitlines()[0].split(",")
    assert len(header) >= 2
    index = json.loads((out / "index.json").read_text())
    assert index["count"] == 2
    for entry in index["artifacts"]:
        assert entry["sha256"] == sha256_file(out / entry["path"])


@pytest.mark.parametrize("task", sorted(FAST))
def test_outputs_are_byte_identical_across_runs(tmp_path, task):
    _, a = _run(tmp_path, task, FAST[task], name="a")
    _, b = _run(tmp_path, task, FAST[task], name="b")
    for suffix in ("json", "csv"):
        fa, fb = a / f"{_stem(task)}.{suffix}", b / f"{_stem(task)}.{suffix}"
        assert fa.read_bytes() == fb.read_bytes()


@pytest.mark.parametrize("task", ["limit-set", "cluster-set", "korovkin-bound"])
def test_provenance_config_reproduces_result(tmp_path, task):
    _, out = _run(tmp_path, task, FAST[task], name="first")
    doc = json.loads((out / f"{_stem(task)}.json").read_text())
    _, again = _run(tmp_path, task, doc["provenance"]["config"], name="second")
    doc2 = json.loads((again / f"{_stem(task)}.json").read_text())
    assert doc2["result"] == doc["result"]


@pytest.mark.parametrize("task", ["limit-set", "cluster-set"])
def test_threads_do_not_change_results(tmp_path, task):
    _, a = _run(tmp_path, task, FAST[task], name="one")
    _, b = _run(tmp_path, task, FAST[task], "--threads", "4", name="four")
    assert (a / f"{_stem(task)}.csv").read_bytes() == (b / f"{_stem(task)}.csv").read_bytes()


def test_horizon_override(tmp_path):
    _, out = _run(tmp_path, "density", FAST["density"], "--horizon", "500")
    doc = json.loads((out / "density.json").read_text())
    assert doc["result"]["horizon"] == 500
    assert doc["provenance"]["config"]["horizon"] == 500


def test_inconclusive_exit_code(tmp_path):
    code, out = _run(tmp_path, "min-degree", THIRDS)
    assert code == cli.EXIT_INCONCLUSIVE
    doc = json.loads((out / "min_degree.json").read_text())
    assert doc["status"] == "inconclusive"
    assert len(doc["result"]["scans"]) == 2


@pytest.mark.parametrize("cfg, path", [
    ({"set": "evens", "horizn": 10}, "horizn"),
    ({"set": {"kind": "expr", "expr": "t % 2 == 0", "colour": 1}}, "set.colour"),
    ({"ideal": {"kind": "natural_density", "tau": 0.1}}, "ideal.tau"),
])
def test_unknown_key_reported_with_path(cfg, path):
    with pytest.raises(ConfigError) as info:
        experiment.run({"task": "density", **cfg})
    assert info.value.path == path


@pytest.mark.parametrize("cfg", [
    {"sequence": "sec2_example", "r": -1.0, "grid": {"lo": 0, "hi": 1, "step": 0.1}},
    {"sequence": "no_such_sequence", "r": 1.0, "grid": {"lo": 0, "hi": 1, "step": 0.1}},
    {"sequence": {"kind": "expr", "expr": "__import__('os')"}, "r": 1.0,
     "grid": {"lo": 0, "hi": 1, "step": 0.1}},
    {"sequence": "sec2_example", "r": 1.0, "grid": {"lo": 1, "hi": 0, "step": 0.1}},
])
def test_invalid_configs_exit_one(tmp_path, cfg, capsys):
    code, _ = _run(tmp_path, "limit-set", cfg)
    assert code == cli.EXIT_ERROR
    assert capsys.readouterr().err.startswith("error:")


def test_task_mismatch_and_bad_json(tmp_path):
    code, _ = _run(tmp_path, "density", {"task": "tachev"})
    assert code == cli.EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["density", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert cli.main(["density", "--config", str(tmp_path / "missing.json"),
                     "--out", str(tmp_path)]) == 1


def test_threads_must_be_positive(tmp_path):
    code, _ = _run(tmp_path, "density", FAST["density"], "--threads", "0")
    assert code == cli.EXIT_ERROR


def test_empty_bundle_and_missing_artifact(tmp_path):
    index = report_bundle([], tmp_path / "index.json")
    assert index["count"] == 0 and index["artifacts"] == []
    with pytest.raises(MissingArtifactError):
        report_bundle([tmp_path / "nope.csv"])


@pytest.mark.parametrize("v, s", [
    (1.0, "1.0"), (0.1, "0.10000000000000001"), (1e300, "1.0000000000000001e+300"),
    (float("inf"), "inf"), (float("-inf"), "-inf"), (float("nan"), "nan"), (-2.0, "-2.0"),
])
def test_format_float(v, s):
    assert format_float(v) == s
    if s not in ("inf", "-inf", "nan"):
        assert float(s) == v


def test_non_finite_json_is_quoted():
    assert dumps({"a": float("inf"), "b": [1.5, None, True]}) == \
        '{\n  "a": "inf",\n  "b": [1.5, null, true]\n}\n'


def test_csv_columns_documented_for_every_task():
    assert set(experiment.csv_columns()) == set(experiment.TASKS)


def test_console_entry_point_runs(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "roughideal.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "roughideal" in proc.stdout
