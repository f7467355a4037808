import csv
import io
import json

import pytest

from splitplan.cli import COMPARE_COLUMNS, SWEEP_COLUMNS, main
from splitplan.oracle import true_selection
from splitplan.problem import evaluate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_optimize_matches_oracle(capsys, instances):
    code, out, _ = run(capsys, "optimize", "alexnet", "--seed", "42")
    assert code == 0
    doc = json.loads(out)
    _, choice = true_selection(instances["alexnet"])
    assert doc["chosen_l1"] == choice.l1
    assert doc["chosen_l1"] + doc["chosen_l2"] == 21
    assert doc["seed"] == 42 and doc["ga_config"]["population_size"] == 40
    assert set(doc["breakdown"]) >= {"t_client", "t_upload", "t_server", "e_client", "e_upload", "e_download"}


def test_optimize_json_round_trip(capsys, instances):
    _, out, _ = run(capsys, "optimize", "vgg11", "--seed", "3")
    doc = json.loads(out)
    instance = instances["vgg11"]
    vector = evaluate(instance, instance.candidate(doc["chosen_l1"]))
    assert (doc["objectives"]["f1_s"], doc["objectives"]["f2_mJ"], doc["objectives"]["f3_bytes"]) == tuple(vector)
    for row in doc["pareto_set"]:
        assert tuple(evaluate(instance, instance.candidate(row["l1"]))) == (row["f1_s"], row["f2_mJ"], row["f3_bytes"])


def test_optimize_explicit_files(capsys, tmp_path):
    from splitplan.problem import default_devices_path
    from splitplan.profile import bundled_path

    code, out, _ = run(capsys, "optimize", str(bundled_path("alexnet")), str(default_devices_path()))
    assert code == 0 and json.loads(out)["model"] == "alexnet"


@pytest.mark.parametrize("output", ["table", "csv"])
def test_optimize_other_renderings(capsys, output):
    code, out, _ = run(capsys, "optimize", "alexnet", "--output", output)
    assert code == 0 and "f1_s" in out


def test_exit_infeasible(capsys):
    code, out, err = run(capsys, "optimize", "alexnet", "--memory-cap", "1")
    assert code == 2 and out == ""
    assert err.count("\n") == 1


def test_exit_parse(capsys, tmp_path):
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{{ not json")
    code, _, err = run(capsys, "optimize", str(garbage))
    assert code == 1 and err.startswith("error:")
    code, _, _ = run(capsys, "optimize", str(tmp_path / "missing.json"))
    assert code == 1


def test_exit_invalid(capsys, tmp_path):
    code, _, _ = run(capsys, "optimize", "alexnet", "--pop", "5")
    assert code == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "input_shape": [3, 8, 8], "layers": [{"kind": "relu"}, {"kind": "linear", "in_features": 5, "out_features": 2}]}))
    code, _, _ = run(capsys, "optimize", str(bad))
    assert code == 3


def test_sweep_rows_and_round_trip(capsys, instances):
    code, out, _ = run(capsys, "sweep", "alexnet")
    assert code == 0
    assert out.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    rows = parse_csv(out)
    assert len(rows) == 20
    instance = instances["alexnet"]
    for row in rows:
        vector = evaluate(instance, instance.candidate(int(row["l1"])))
        assert float(row["f1_s"]) == vector.f1
        assert float(row["f2_mJ"]) == vector.f2
        assert int(row["f3_bytes"]) == vector.f3
        assert int(row["l2"]) == 21 - int(row["l1"])


def test_sweep_single_choice(capsys, instances):
    _, out, _ = run(capsys, "sweep", "vgg16")
    chosen = [int(r["l1"]) for r in parse_csv(out) if r["chosen"] == "true"]
    _, choice = true_selection(instances["vgg16"])
    assert chosen == [choice.l1]


def test_sweep_without_feasible_split(capsys):
    code, out, _ = run(capsys, "sweep", "alexnet", "--memory-cap", "1")
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 20
    assert not any(r["chosen"] == "true" or r["feasible"] == "true" for r in rows)


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "alexnet", "--output", "json")
    assert code == 0
    rows = {r["algorithm"]: r for r in json.loads(out)}
    assert set(rows) == {"NSGA2-TOPSIS", "LBO", "EBO", "COS", "COC", "RS"}
    assert rows["COS"]["l1"] == 21 and rows["COC"]["l1"] == 0
    assert rows["COS"]["outside_feasible"] and rows["COC"]["outside_feasible"]
    in_space = [r for r in rows.values() if not r["outside_feasible"]]
    assert all(rows["LBO"]["f1_s"] <= r["f1_s"] for r in in_space)


@pytest.mark.parametrize("model", ["alexnet", "vgg16", "mobilenetv2"])
def test_cos_undercuts_lbo_latency(capsys, model):
    # the default client out-computes the server and COS uploads nothing,
    # so the all-client row beats the best in-space split on f1
    _, out, _ = run(capsys, "compare", model, "--output", "json")
    rows = {r["algorithm"]: r for r in json.loads(out)}
    assert rows["COS"]["f1_s"] < rows["LBO"]["f1_s"]


def test_compare_renderings(capsys):
    _, table, _ = run(capsys, "compare", "vgg16")
    lines = table.splitlines()
    assert lines[0].split() == list(COMPARE_COLUMNS) and len(lines) == 8
    _, text, _ = run(capsys, "compare", "vgg16", "--output", "csv")
    rows = parse_csv(text)
    assert {r["algorithm"]: int(r["l1"]) for r in rows}["COS"] == 39


def test_bandwidth_flag(capsys):
    _, slow, _ = run(capsys, "sweep", "alexnet", "--bandwidth", "1")
    _, fast, _ = run(capsys, "sweep", "alexnet", "--bandwidth", "100")
    assert float(parse_csv(slow)[0]["f1_s"]) > float(parse_csv(fast)[0]["f1_s"])


def test_profile(capsys):
    code, out, _ = run(capsys, "profile", "alexnet", "--output", "json")
    doc = json.loads(out)
    assert code == 0 and doc["total_layers"] == 21
    assert doc["layers"][0]["params"] == 23_296
    assert doc["layers"][-1]["params"] == 4_097_000
    _, table, _ = run(capsys, "profile", "mobilenetv2")
    assert table.startswith("mobilenetv2: 21 layers")
