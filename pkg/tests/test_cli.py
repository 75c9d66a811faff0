import io
import json
import subprocess
import sys
import time

import pytest

from conftest import PROGRAMS
from setsynth.cli import RunConfig, cmd_run, cmd_synthesize, main
from setsynth.values import dumps, value_from_json


def run(source, entry, **kw):
    out, err = io.StringIO(), io.StringIO()
    src = str(PROGRAMS / source) if source else ""
    code = cmd_run(RunConfig(src, entry, **kw), out, err)
    return code, out.getvalue().strip(), err.getvalue()


def test_anyof_two_multisets():
    assert run("anyof.mc", "anyOfS [0?1,2,3]") == (0, "[[0,2,3],[1,2,3]]", "")


def test_literal_in_oracle_mode():
    assert run("", "3", mode="oracle")[:2] == (0, "[3]")


def test_diff_double01():
    assert run("double01.mc", "double01S", mode="diff")[:2] == (0, "MATCH {0,2}")


def test_diff_several_sets():
    assert run("anyof.mc", "anyOfS [0?1,2,3]", mode="diff")[:2] == (0, "MATCH {0,2,3} {1,2,3}")


def test_paper_entries_in_both_modes():
    for mode in ("synth", "oracle"):
        assert run("ndconst.mc", "ndconstS 2 failed", mode=mode)[1] == "[[2,1]]"
        assert run("notf.mc", "notsS failed", mode=mode)[1] == "[]"
        assert run("notf.mc", "notfS", mode=mode)[1] == "[[]]"
        assert run("double01.mc", "double01", mode=mode)[1] == "[0,2]"


def test_plural_entry():
    assert run("lists.mc", "permP [1,2]")[1] == "[[1,2],[2,1]]"


def test_bfs_strategy():
    code, out, _ = run("anyof.mc", "anyOfS [1,2,3]", strategy="bfs")
    assert code == 0 and sorted(json.loads(out)[0]) == [1, 2, 3]


def test_unknown_identifier_is_a_diagnostic():
    code, _, err = run("anyof.mc", "nope")
    assert code == 1 and "nope" in err


def test_missing_file_is_a_diagnostic():
    code, _, err = run("does-not-exist.mc", "1")
    assert code == 1 and err.startswith("error:")


def test_invalid_max_values():
    with pytest.raises(ValueError):
        RunConfig("", "1", max_values=0)


@pytest.mark.parametrize("entry,src", [("anyOfS [0?1,2,3]", "anyof.mc"), ("pairsS [1,2]", "lists.mc"),
                                       ("notS (True ? False)", "notf.mc"), ("one23", "lists.mc")])
def test_json_round_trip(entry, src):
    code, out, _ = run(src, entry, format="json")
    assert code == 0
    data = json.loads(out)
    if entry.split()[0].endswith("S"):
        decoded = [[value_from_json(v) for v in s] for s in data]
    else:
        decoded = [value_from_json(v) for v in data]
    assert dumps(decoded) == out


def test_max_values_on_infinite_set():
    t0 = time.perf_counter()
    code, out, err = run("nats.mc", "natsS", max_values=5)
    assert time.perf_counter() - t0 < 1.0
    assert code == 0 and out == "[[0,1,2,3,4]]" and "truncated" in err


def test_synthesize_writes_bundle(tmp_path):
    target = tmp_path / "not.ir"
    assert cmd_synthesize(str(PROGRAMS / "notf.mc"), ["not"], str(target)) == 0
    text = target.read_text()
    assert "notP s e x1 =" in text and "notS x1 = fromST 1" in text


def test_synthesize_empty_targets_warns(tmp_path):
    out, err = io.StringIO(), io.StringIO()
    assert cmd_synthesize(str(PROGRAMS / "anyof.mc"), [], None, out, err) == 0
    assert "warning" in err.getvalue() and "plural" not in out.getvalue()


def test_synthesize_unknown_target():
    err = io.StringIO()
    assert cmd_synthesize(str(PROGRAMS / "anyof.mc"), ["nope"], None, io.StringIO(), err) == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "setsynth.cli", "run", str(PROGRAMS / "double01.mc"),
                           "-e", "double01S", "--mode", "diff"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "MATCH {0,2}"


def test_main_rejects_bad_max_values(capsys):
    assert main(["run", "-e", "1", "--max-values", "0"]) == 1


def test_diff_mismatch_exit_code(monkeypatch):
    from setsynth import session
    real = session.Session.eval_synth

    def broken(self, e, opts=session.RunOptions()):
        r = real(self, e, opts)
        return session.EntryResult(r.kind, r.items[:1], r.truncated)

    monkeypatch.setattr(session.Session, "eval_synth", broken)
    code, out, _ = run("anyof.mc", "anyOfS [0?1,2,3]", mode="diff")
    assert code == 2 and out.startswith("MISMATCH")
