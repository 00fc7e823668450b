import json

import pytest

from asdcong import registry, tables
from asdcong.cli import JobSpec, UsageError, main, read_sequence
from asdcong.qconstructors import EtaQuotient
from asdcong.registry import run_example


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("example_id", registry.example_ids())
def test_reproduce_every_example(example_id):
    rep = run_example(example_id)
    assert rep["ok"], {r["name"]: r["checks"] for r in rep["runs"]}


def test_reproduce_cli(capsys):
    code, out, _ = run_cli(capsys, "reproduce", "ex1")
    assert code == 0
    rec = json.loads(out)
    assert rec["ok"] and rec["runs"][0]["b"][:4] == ["1", "-5", "35", "-275"]


def test_unknown_example_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "reproduce", "nope")
    assert code == 2 and "unknown example" in err


def test_bad_bounds_are_usage_errors(capsys):
    assert run_cli(capsys, "reproduce", "ex1", "--prime-max", "1")[0] == 2
    assert run_cli(capsys, "reproduce", "ex1", "--prime-max", "50", "--index-bound", "20")[0] == 2
    job = JobSpec("search", level=5, character="jacobi_top/5", weight=2, precision=3)
    with pytest.raises(UsageError):
        job.validate()


def test_search_and_expand(capsys):
    base = ["--level", "5", "--character", "jacobi_top/5", "--weight", "2", "--t", "eta(5)^6/eta(1)^6"]
    code, out, _ = run_cli(capsys, "search", *base)
    assert code == 0 and "E" in json.loads(out)["combo_text"]
    code, out, _ = run_cli(capsys, "expand", *base, "--f", "eta(1)^5/eta(5)", "--index-bound", "20")
    assert code == 0
    assert "-1385725" in out


def test_search_infeasible_exit_code(capsys):
    code, _, _ = run_cli(capsys, "search2", "--level", "1", "--weight", "4", "--g", "eta(1)^24")
    assert code == 2


def _write_bfile(path, n, corrupt=None):
    from asdcong.engine import expand_in_t

    t = EtaQuotient.parse("eta(5)^6/eta(1)^6", 5).series(n + 2)
    f = EtaQuotient.parse("eta(1)^5/eta(5)", 5).series(n + 2)
    b = [int(x) for x in expand_in_t(f, t, n).b]
    if corrupt is not None:
        b[corrupt] += 1
    path.write_text(json.dumps({"b": [str(x) for x in b]}))
    return b


def test_verify_clean_and_corrupted(tmp_path, capsys):
    good = tmp_path / "good.json"
    _write_bfile(good, 60)
    code, _, _ = run_cli(capsys, "verify", str(good), "--prime", "11", "--prime", "19", "--index-bound", "60")
    assert code == 0
    bad = tmp_path / "bad.json"
    _write_bfile(bad, 60, corrupt=50)
    code, out, _ = run_cli(capsys, "verify", str(bad), "--prime", "5", "--index-bound", "60")
    assert code == 1
    w = json.loads(out)["reports"][0]["first_failure"]
    assert (w["index"], w["ell"], w["r"]) == (50, 2, 2)


def test_read_sequence_formats(tmp_path):
    a = tmp_path / "a.json"
    a.write_text("[1, -5, 35]")
    b = tmp_path / "b.txt"
    b.write_text("1\n-5\n35\n")
    c = tmp_path / "c.json"
    c.write_text('{"b": ["1", "-5", "35"]}')
    assert read_sequence(a) == read_sequence(b) == read_sequence(c)


def test_outputs_are_deterministic(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "reproduce", "g2", "--format", "csv")
        outs.append(out)
        assert code == 0
    assert outs[0] == outs[1]
    _, a, _ = run_cli(capsys, "reproduce", "g5", "--format", "md")
    _, b, _ = run_cli(capsys, "reproduce", "g5", "--format", "md")
    assert a == b and a.startswith("|")


def test_scan_small(capsys):
    code, out, _ = run_cli(capsys, "scan", "--max-level", "3", "--prime-max", "13", "--index-bound", "60", "--workers", "1")
    assert code == 0
    rec = json.loads(out)
    assert rec


def test_dims_table3(capsys):
    code, out, _ = run_cli(capsys, "dims", "--table", "3", "--max-weight", "14")
    assert code == 0


def test_dims_table1_reports_level_ten(capsys):
    code, out, _ = run_cli(capsys, "dims", "--table", "1", "--max-weight", "12")
    assert code == 1
    assert "jacobi_top/5" in out


def test_table_data_round_trip_and_validate():
    data = tables.TableData.load()
    again = tables.TableData.from_json(data.to_json())
    assert again == data and again.to_json() == data.to_json()
    for r in data.table2:
        s = r["eta"].series(3)
        assert s.lead == 1 and s[1] == 1
    problems = data.validate()
    assert problems == [f"table1 (10, jacobi_top/5, k={k}): condition (*) fails" for k in (4, 8, 12, 16, 20, 24)]
    with pytest.raises(tables.DataError):
        tables.TableData.load(strict=True)


def test_table_validate_flags_broken_rows():
    raw = json.loads(tables.TableData.load().to_json())
    raw["table2"][0]["t"] = "eta(1)^6/eta(5)^6"
    raw["table2"][0]["level"] = 5
    row4 = raw["table4"][0]
    A = EtaQuotient.parse(row4["A"], row4["level"])
    row4["A"] = str(EtaQuotient(A.level, {d: -r for d, r in A.as_dict.items()}))
    problems = tables.TableData(raw).validate(max_weight=4)
    assert any(p.startswith("table2") for p in problems)
    assert any(p.startswith("table4") for p in problems)
