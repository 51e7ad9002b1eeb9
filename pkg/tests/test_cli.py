import csv
import json

import numpy as np
import pytest

from monogamy import cli
from monogamy import experiments as ex
from monogamy.linalg import projector
from monogamy.sampler import random_mixed_batch
from monogamy.statefile import write_state
from monogamy.states import basis, bell_bell, bell_phi_plus, ghz, w_state, zeros


def run(argv, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = cli.main(argv + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def body(text):
    lines = text.splitlines()
    assert lines[0].startswith("# generated: ")
    return "\n".join(lines[1:])


def summary(text):
    return json.loads(body(text))


@pytest.fixture
def state_files(tmp_path):
    paths = {}
    for name, s in [("ghz", ghz()), ("w", w_state()), ("zero3", zeros(3)), ("bb", bell_bell()), ("zero4", zeros(4))]:
        paths[name] = tmp_path / f"{name}.json"
        write_state(paths[name], s)
    paths["mm2"] = tmp_path / "mm2.json"
    write_state(paths["mm2"], np.eye(4) / 4)
    paths["mm3"] = tmp_path / "mm3.json"
    write_state(paths["mm3"], np.eye(8) / 8)
    paths["rank2"] = tmp_path / "rank2.json"
    write_state(paths["rank2"], random_mixed_batch(2, 2, 42, 0, 1)[0])
    return paths


def test_canonical(tmp_path):
    code, text = run(["canonical"], tmp_path)
    assert code == 0
    rows = {(r["state"], r["quantity"]): r["computed"] for r in summary(text)["rows"]}
    assert rows["GHZ", "gen_concurrence2"] == pytest.approx(1.5, abs=1e-10)
    assert rows["W", "sum_pair_concurrence2"] == pytest.approx(4 / 3, abs=1e-10)
    assert rows["Bell(x)Bell", "gap4"] == pytest.approx(-0.25, abs=1e-10)


def test_verify_mmc_single_sample(tmp_path):
    for seed in (0, 1, 2**63):
        code, text = run(["verify-mmc", "--samples", "1", "--seed", str(seed)], tmp_path)
        assert code == 0
        assert summary(text)["max_abs_residual"] < 1e-10


def test_verify_mmc_input_ghz(tmp_path, state_files):
    code, text = run(["verify-mmc", "--input", str(state_files["ghz"])], tmp_path)
    s = summary(text)
    assert code == 0 and s["samples"] == 1 and s["max_abs_residual"] < 1e-14


@pytest.mark.parametrize("name", ["w", "zero3"])
def test_verify_ckw_inputs(tmp_path, state_files, name):
    code, text = run(["verify-ckw", "--input", str(state_files[name])], tmp_path)
    s = summary(text)
    assert code == 0
    assert abs(s["min_tau"]) < 1e-12 and s["max_pivot_spread"] < 1e-12


def test_verify_ckw_csv_records(tmp_path):
    code, text = run(["verify-ckw", "--samples", "5", "--format", "csv"], tmp_path)
    assert code == 0
    rows = list(csv.reader(body(text).splitlines()))
    assert tuple(rows[0]) == cli.CSV_HEADER
    assert len(rows) == 1 + 5 * 3
    assert {r[2] for r in rows[1:]} == {"tau_pivot0", "tau_pivot1", "tau_pivot2"}


def test_hunt4_counterexample_input_fails(tmp_path, state_files):
    code, text = run(["hunt4", "--input", str(state_files["bb"])], tmp_path)
    s = summary(text)
    assert code == 1
    assert s["violations"] == 1
    # the violating state is kept in the report
    assert s["violating_samples"][0]["value"] == pytest.approx(-0.25, abs=1e-10)
    assert len(s["violating_samples"][0]["amplitudes"]) == 16


def test_hunt4_product_input(tmp_path, state_files):
    code, text = run(["hunt4", "--input", str(state_files["zero4"])], tmp_path)
    assert code == 0
    assert summary(text)["min_gap4"] == 0.0


def test_hunt4_small_run(tmp_path):
    code, text = run(["hunt4", "--samples", "500", "--seed", "3"], tmp_path)
    s = summary(text)
    assert code == 0
    assert s["counterexample"]["violates"] and s["counterexample"]["gap4"] == pytest.approx(-0.25, abs=1e-10)
    h = s["histogram"]
    assert h["underflow"] + sum(h["counts"]) + h["overflow"] == 500
    assert len(h["counts"]) == 50


def test_reports_deterministic_apart_from_header(tmp_path):
    argv = ["hunt4", "--samples", "300", "--seed", "9", "--shards", "4"]
    _, a = run(argv, tmp_path, "a.txt")
    _, b = run(argv, tmp_path, "b.txt")
    assert body(a) == body(b)
    _, c = run(["verify-mmc", "--samples", "20", "--format", "csv"], tmp_path, "c.txt")
    _, d = run(["verify-mmc", "--samples", "20", "--format", "csv"], tmp_path, "d.txt")
    assert body(c) == body(d)


def test_hunt4_shard_invariance():
    one = ex.hunt_4q(3000, seed=5, shards=1)
    eight = ex.hunt_4q(3000, seed=5, shards=8)
    for key in ("min_gap4", "argmin_gap4_sample", "violations", "histogram", "ckw_min_gap_per_pivot"):
        assert one.summary[key] == eight.summary[key]


def test_hunt4_csv_matches_shards(tmp_path):
    _, a = run(["hunt4", "--samples", "40", "--format", "csv"], tmp_path, "a.csv")
    _, b = run(["hunt4", "--samples", "40", "--shards", "3", "--format", "csv"], tmp_path, "b.csv")
    rows_a = sorted(csv.reader(body(a).splitlines()[1:]))
    rows_b = sorted(csv.reader(body(b).splitlines()[1:]))
    assert rows_a == rows_b and len(rows_a) == 40 * 5


def test_hunt4_workers_match_serial():
    serial = ex.hunt_4q(2000, seed=8, shards=4)
    pooled = ex.hunt_4q(2000, seed=8, shards=4, workers=2)
    assert serial.summary == pooled.summary


def test_mixed_bound_inputs(tmp_path, state_files):
    code, text = run(["mixed-bound", "--input", str(state_files["mm3"])], tmp_path)
    s = summary(text)
    assert code == 0 and s["min_gap"] >= 0


def test_mixed_bound_rank_one(tmp_path):
    code, text = run(["mixed-bound", "--samples", "5", "--rank", "1"], tmp_path)
    assert code == 0 and summary(text)["min_gap"] >= -1e-6


def test_mixed_bound_small_rank_two(tmp_path):
    code, text = run(["mixed-bound", "--samples", "3", "--restarts", "8"], tmp_path)
    assert code == 0


def test_roof_ghz(tmp_path, state_files):
    code, text = run(["roof", "--input", str(state_files["ghz"]), "--measure", "gen-concurrence2"], tmp_path)
    assert code == 0
    assert summary(text)["value"] == pytest.approx(1.5, abs=1e-12)


def test_roof_rank_two_two_qubit(tmp_path, state_files):
    from monogamy.statefile import read_state
    from monogamy.measures import wootters_concurrence

    rho = read_state(state_files["rank2"]).density_matrix()
    code, text = run(
        ["roof", "--input", str(state_files["rank2"]), "--measure", "concurrence2", "--show-ensemble"], tmp_path
    )
    s = summary(text)
    assert code == 0
    assert s["value"] == pytest.approx(wootters_concurrence(rho) ** 2, abs=1e-4)
    ens = s["ensemble"]
    rebuilt = sum(
        e["weight"] * projector(np.array([complex(*z) for z in e["amplitudes"]])) for e in ens
    )
    np.testing.assert_allclose(rebuilt, rho, atol=1e-8)


def test_roof_maximally_mixed(tmp_path, state_files):
    code, text = run(["roof", "--input", str(state_files["mm2"]), "--measure", "concurrence2"], tmp_path)
    assert code == 0 and summary(text)["value"] < 1e-9


def test_usage_and_input_errors(tmp_path, state_files, capsys):
    assert cli.main(["verify-mmc", "--samples", "0"]) == 2
    assert cli.main(["bogus"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_qubits": 3, "kind": "pure", "data": [[1, 0]]}')
    assert cli.main(["roof", "--input", str(bad)]) == 2
    assert "field 'data'" in capsys.readouterr().err
    # wrong register size for the check
    assert cli.main(["verify-mmc", "--input", str(state_files["bb"])]) == 2
    nonpsd = tmp_path / "nonpsd.json"
    nonpsd.write_text(json.dumps({"n_qubits": 1, "kind": "mixed", "data": [[1.5, 0], [0, 0], [0, 0], [-0.5, 0]]}))
    assert cli.main(["roof", "--input", str(nonpsd)]) == 2


def test_stdout_when_no_out(capsys):
    assert cli.main(["canonical", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[1] == ",".join(cli.CSV_HEADER)
