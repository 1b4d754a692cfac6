import csv
import io
import json
import math

import pytest

from uora_aoi.analytics import average_aoi
from uora_aoi.cli import ANALYTIC_COLUMNS, main
from uora_aoi.config import NetworkConfig


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _table(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


SCENARIO = ["--n", "15", "--l", "5", "--lambda", "0.6", "--eocw-min", "3", "--m", "3"]


def test_analyze_matches_library(capsys):
    code, out, _ = _run(capsys, ["analyze", *SCENARIO])
    assert code == 0
    assert out.startswith("# {")
    rows = _table(out)
    assert list(rows[0]) == ANALYTIC_COLUMNS
    expected = average_aoi(NetworkConfig(15, 5, 0.6, 3, 3)).aaoi
    assert float(rows[0]["aaoi"]) == pytest.approx(expected, rel=1e-9)


def test_analyze_json(capsys):
    code, out, _ = _run(capsys, ["analyze", *SCENARIO, "--format", "json"])
    doc = json.loads(out)
    assert code == 0
    assert doc["config"]["n_stas"] == 15
    assert sum(doc["mu"]) == pytest.approx(1.0)


def test_invalid_lambda(capsys):
    code, _, err = _run(capsys, ["analyze", "--n", "15", "--l", "5", "--lambda", "1.5",
                                 "--eocw-min", "3"])
    assert code == 2
    assert "arrival_rate" in err


def test_bad_flag_is_invalid_input(capsys):
    with pytest.raises(SystemExit) as info:
        main(["analyze", "--n", "ten"])
    assert info.value.code == 2


def test_trivial_network(capsys):
    code, out, _ = _run(capsys, ["analyze", "--n", "1", "--l", "1", "--eocw-min", "0", "--m", "0",
                                 "--lambda", "1"])
    assert code == 0
    assert float(_table(out)[0]["aaoi"]) == 1.0


def test_config_file_and_override(tmp_path, capsys):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"n_stas": 10, "n_rus": 4, "arrival_rate": 0.5,
                                "eocw_min": 3, "m": 1}))
    code, out, _ = _run(capsys, ["analyze", "--config", str(path), "--lambda", "0.9"])
    assert code == 0
    header = json.loads(out.splitlines()[0][2:])
    assert header["arrival_rate"] == 0.9
    assert header["n_stas"] == 10
    row = _table(out)[0]
    assert float(row["lambda"]) == 0.9


def test_non_convergence_exit_code(monkeypatch, capsys):
    from uora_aoi import cli
    from uora_aoi.steady_state import FixedPointError

    def fail(config):
        raise FixedPointError("stuck", 0.1, 0.2, 1.0, 10)

    monkeypatch.setattr(cli, "average_aoi", fail)
    code, _, err = _run(capsys, ["analyze", *SCENARIO])
    assert code == 3
    assert "stuck" in err


def test_simulate_reproducible(tmp_path, capsys):
    args = ["simulate", *SCENARIO, "--slots", "20000", "--warmup", "100", "--reps", "2",
            "--seed", "42"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_round_robin_saturated(capsys):
    code, out, _ = _run(capsys, ["simulate", "--policy", "rr", "--n", "4", "--l", "4",
                                 "--lambda", "1", "--eocw-min", "0", "--slots", "5000",
                                 "--warmup", "10", "--reps", "2"])
    assert code == 0
    assert abs(float(_table(out)[0]["sim_aaoi"]) - 1.0) <= 1e-9


def test_simulate_invalid(capsys):
    code, _, _ = _run(capsys, ["simulate", *SCENARIO, "--slots", "10", "--warmup", "10"])
    assert code == 2


def test_optimize_alg1(capsys):
    code, out, _ = _run(capsys, ["optimize", "--method", "alg1", "--n", "20", "--l", "6"])
    assert code == 0
    rows = _table(out)
    assert 1 <= len(rows) <= 3
    code, out, _ = _run(capsys, ["optimize", "--method", "exhaustive", "--n", "20", "--l", "6"])
    best_ex = min(float(r["aaoi"]) for r in _table(out))
    best_1 = min(float(r["aaoi"]) for r in rows)
    assert best_1 <= 1.05 * best_ex


def test_optimize_alg2(capsys):
    code, out, _ = _run(capsys, ["optimize", "--method", "alg2", "--n", "20", "--l", "6",
                                 "--lambda", "0.7", "--format", "json"])
    doc = json.loads(out)
    code_ex, out_ex, _ = _run(capsys, ["optimize", "--n", "20", "--l", "6", "--lambda", "0.7",
                                       "--format", "json"])
    assert code == code_ex == 0
    assert doc["result"]["predicted_aaoi"] <= 1.05 * json.loads(out_ex)["result"]["predicted_aaoi"]
    assert len(doc["rows"]) <= 8


def test_optimize_alg1_needs_saturation(capsys):
    code, _, _ = _run(capsys, ["optimize", "--method", "alg1", "--n", "20", "--l", "6",
                               "--lambda", "0.5"])
    assert code == 2


def test_sweep_lambda_shapes(capsys):
    code, out, _ = _run(capsys, ["sweep", "--param", "lambda", "--from", "0.05", "--to", "1.0",
                                 "--step", "0.05", "--n", "12", "--l", "4", "--eocw-min", "2",
                                 "--m", "4"])
    assert code == 0
    rows = _table(out)
    assert len(rows) == 20
    q = [float(r["q"]) for r in rows]
    assert all(b <= a + 1e-9 for a, b in zip(q, q[1:]))
    aaoi = [float(r["aaoi"]) for r in rows]
    k = aaoi.index(min(aaoi))
    assert 0 < k < len(aaoi) - 1
    assert all(b <= a for a, b in zip(aaoi[:k], aaoi[1:k + 1]))
    assert all(b >= a for a, b in zip(aaoi[k:], aaoi[k + 1:]))


@pytest.mark.parametrize("m", [0, 1])
def test_sweep_eocw_flat_start(capsys, m):
    code, out, _ = _run(capsys, ["sweep", "--param", "eocw_min", "--from", "0", "--to",
                                 str(7 - m), "--n", "10", "--l", "4", "--lambda", "0.5",
                                 "--m", str(m)])
    rows = _table(out)
    flat = [float(r["aaoi"]) for r in rows if 2 ** int(r["eocw_min"]) * 2**m <= 5]
    assert len(flat) >= 2 and len(set(flat)) == 1
    assert float(rows[len(flat)]["aaoi"]) != flat[0]


def test_sweep_out_of_range(capsys):
    code, _, _ = _run(capsys, ["sweep", "--param", "eocw_min", "--from", "0", "--to", "7",
                               "--n", "10", "--l", "4", "--m", "2"])
    assert code == 2
    code, _, _ = _run(capsys, ["sweep", "--param", "lambda", "--from", "0.5", "--to", "0.1",
                               "--n", "10", "--l", "4"])
    assert code == 2


def test_sweep_with_simulation(capsys):
    code, out, _ = _run(capsys, ["sweep", "--param", "n_stas", "--from", "4", "--to", "6",
                                 "--l", "2", "--lambda", "0.5", "--eocw-min", "2",
                                 "--simulate", "--slots", "20000", "--warmup", "100",
                                 "--reps", "2"])
    assert code == 0
    rows = _table(out)
    assert [int(r["n"]) for r in rows] == [4, 5, 6]
    assert all(r["sim_aaoi"] for r in rows)


def test_roots_regimes(capsys):
    code, out, _ = _run(capsys, ["roots", "--n", "20", "--l", "10"])
    assert code == 0
    roots = json.loads(out.splitlines()[1].split(": ", 1)[1])
    assert roots["regime"] == "three-root"
    code, out, _ = _run(capsys, ["roots", "--n", "10", "--l", "20", "--format", "json"])
    doc = json.loads(out)
    assert doc["roots"]["regime"] == "one-root"
    assert doc["roots"]["r2"] == math.sqrt(21)


def test_roots_table_identity(capsys):
    code, out, _ = _run(capsys, ["roots", "--n", "20", "--l", "10"])
    for row in _table(out):
        w = float(row["w"])
        if (w - 1) % 10 == 0:
            assert float(row["lb_hat"]) == pytest.approx(float(row["lb_bar"]), rel=1e-9)


def test_roots_requires_valid_sizes(capsys):
    code, _, _ = _run(capsys, ["roots", "--n", "1", "--l", "10"])
    assert code == 2


def test_sweep_w0_exponent_bound(capsys):
    code, out, _ = _run(capsys, ["sweep", "--param", "w0_exponent", "--from", "0", "--to", "7",
                                 "--n", "20", "--l", "6"])
    assert code == 0
    rows = _table(out)
    assert len(rows) == 8
    assert all(float(r["aaoi_lb"]) <= float(r["aaoi"]) + 1e-9 for r in rows)
    code, _, _ = _run(capsys, ["sweep", "--param", "w0_exponent", "--from", "0", "--to", "3",
                               "--n", "20", "--l", "6", "--lambda", "0.5"])
    assert code == 2
