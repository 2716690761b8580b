import json

import pytest

from primavoid import counting
from primavoid.cli import main

F9 = '{"p":3,"s":1,"r":2,"top_modulus":[1,0,1]}'
F81 = '{"p":3,"s":1,"r":4}'
F16 = '{"p":2,"s":2,"r":2}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def test_count_small_example(capsys):
    cfg = json.dumps({"field": json.loads(F9), "basis": [[1, 0], [0, 1]], "c": [0, 0]})
    code, out, _ = run(capsys, "count", "--config", cfg)
    assert code == 0
    (rec,) = records(out)
    assert rec["vinogradov_count"] == rec["brute_force_count"] == 4
    assert rec["agree"] and rec["witness"] == [1, 1]
    for key in ("tool", "version", "command", "seed", "field", "config", "config_hash"):
        assert key in rec
    assert rec["command"] == "count" and rec["tool"] == "primavoid"


def test_count_random_is_deterministic(capsys):
    a = run(capsys, "count", "--field", F81, "--random", "5", "--seed", "11")
    b = run(capsys, "count", "--field", F81, "--random", "5", "--seed", "11")
    c = run(capsys, "count", "--field", F81, "--random", "5", "--seed", "12")
    assert a[0] == 0 and a == b
    assert a[1] != c[1]
    recs = records(a[1])
    assert len(recs) == 5 and all(r["seed"] == 11 and r["agree"] for r in recs)


def test_config_file_path(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps([{"basis": [[1, 0], [0, 1]], "c": [1, 2]}, {"basis": [[1, 1], [1, 2]], "c": [2, 0]}]))
    code, out, _ = run(capsys, "count", "--field", F9, "--config", str(path))
    assert code == 0 and len(records(out)) == 2


def test_malformed_input_exit_1(capsys):
    code, _, err = run(capsys, "count", "--config", "{not json")
    assert code == 1 and "error" in err
    code, _, _ = run(capsys, "field", "--field", '{"p":4,"s":1,"r":2}')
    assert code == 1
    code, _, _ = run(capsys, "field", "--field", '{"p":3,"s":1,"r":4,"top_modulus":[1,0,0,0,1]}')
    assert code == 1
    code, _, _ = run(capsys, "count", "--field", F9, "--config", '{"basis":[[1,1],[2,2]],"c":[0,0]}')
    assert code == 1
    code, _, _ = run(capsys, "count", "--field", F9, "--random", "1", "--cap", str(2**25))
    assert code == 1
    code, _, _ = run(capsys, "count", "--config", "/nonexistent/cfg.json")
    assert code == 1


def test_no_primitive_exit_3_and_q2_warning(capsys):
    cfg = json.dumps({"field": {"p": 2, "s": 1, "r": 3}, "basis": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "c": [1, 1, 1]})
    code, out, err = run(capsys, "count", "--config", cfg)
    assert code == 3
    assert "single element" in err
    (rec,) = records(out)
    assert rec["brute_force_count"] == 0 and rec["single_element"]


def test_q2_primitive_found(capsys):
    cfg = json.dumps({"field": {"p": 2, "s": 1, "r": 3}, "basis": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "c": [0, 0, 0]})
    code, out, err = run(capsys, "count", "--config", cfg)
    assert code == 0 and "warning" in err
    assert records(out)[0]["brute_force_count"] == 1


def test_drift_exit_2(capsys, monkeypatch):
    real = counting.sums_from_logs

    def noisy(logs, n):
        out = real(logs, n)
        out[n // 2] += 0.3
        return out

    monkeypatch.setattr(counting, "sums_from_logs", noisy)
    code, _, err = run(capsys, "count", "--field", F9, "--random", "1")
    assert code == 2 and "error" in err


def test_verify_bounds(capsys):
    code, out, _ = run(capsys, "verify-bounds", "--field", F16, "--random", "4")
    assert code == 0
    for rec in records(out):
        assert rec["all_hold"] and rec["theorem22"]["characters"] == 14
        assert rec["theorem22"]["violations"] == []
    code, out, _ = run(capsys, "verify-bounds", "--field", F81, "--random", "2", "--format", "tsv")
    lines = out.splitlines()
    header = lines[0].split("\t")
    row = dict(zip(header, lines[1].split("\t")))
    assert row["W"] == "4" and row["thm22_bound"] == "36"


def test_verify_bounds_tamper_exit_2(capsys):
    code, out, _ = run(capsys, "verify-bounds", "--field", F81, "--random", "3", "--tamper", "10")
    assert code == 2
    assert any(rec["theorem22"]["violations"] for rec in records(out))


def test_table_tsv(capsys):
    code, out, _ = run(capsys, "table", "--format", "tsv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "q\tlimit\tvalue"
    assert [line.split("\t")[2] for line in lines[1:]] == ["0.936687", "1.02988", "1.09375"]


def test_threshold_q3_note(capsys):
    code, out, _ = run(capsys, "threshold", "--q", "3")
    assert code == 0
    (rec,) = records(out)
    assert rec["condition"] == "q3_condition"
    assert "does not yield any result for q = 3" in rec["inequality1"]
    assert int(rec["r_min"]) > 10**70


def test_threshold_q5_tsv(capsys):
    code, out, _ = run(capsys, "threshold", "--q", "5", "--format", "tsv")
    assert code == 0
    assert "19126240" in out.splitlines()[1]


def test_field_command(capsys):
    code, out, _ = run(capsys, "field", "--field", F9)
    assert code == 0
    (rec,) = records(out)
    assert rec["order"] == 9 and rec["factorization"]
    assert rec["generator"] is not None


def test_canonicalize(capsys):
    code, out, _ = run(capsys, "canonicalize", "--field", F81, "--random", "3", "--seed", "5")
    assert code == 0
    for rec in records(out):
        assert len(rec["hyperplanes"]) == 4
        assert len(rec["input_hyperplanes"]) == 4
    cfg = json.dumps({"field": {"p": 3, "s": 1, "r": 2}, "basis": [[1, 1], [1, 2]], "c": [2, 0]})
    code, out, _ = run(capsys, "canonicalize", "--config", cfg)
    assert code == 0 and records(out)[0]["point"] == [2, 2]


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "0.1.0" in capsys.readouterr().out
