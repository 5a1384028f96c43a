import json
import subprocess
import sys

import pytest

import protocol
from hobisim import parse, struct_congruent
from hobisim.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "p, q, code",
    [
        ("a(X).a(X).0", "a(X).0 | a(X).0", 0),
        ("0", "0", 0),
        ("a!(0)", "b!(0)", 1),
    ],
)
@pytest.mark.parametrize("mode", ["fast", "oracle", "both"])
def test_check_exit_codes(capsys, p, q, code, mode):
    assert run(capsys, "check", p, q, "--mode", mode)[0] == code


def test_oracle_subcommand_reports_a_distinguisher(capsys):
    code, out, _ = run(capsys, "oracle", "a!(<Y>0)", "a!(<y>0)")
    assert code == 1 and "clause 4" in out


def test_check_json_report(capsys):
    code, out, _ = run(capsys, "check", "a(X).(0 | a(X).0)", "a(Y).0 | a(Z).0", "--mode", "both", "--json")
    report = json.loads(out)
    assert code == 0
    assert report["fast"] is report["oracle"] is True
    assert report["command"] == "check" and report["exit"] == 0
    assert report["nodes"] >= 1 and report["fast_ms"] >= 0


def test_reports_are_deterministic_modulo_timing(capsys):
    def strip(out):
        r = json.loads(out)
        return {k: v for k, v in r.items() if not k.endswith("_ms")}

    a = strip(run(capsys, "check", "a!(0) | b(X).X", "b(Y).Y | a!(0)", "--mode", "both", "--json")[1])
    b = strip(run(capsys, "check", "a!(0) | b(X).X", "b(Y).Y | a!(0)", "--mode", "both", "--json")[1])
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "a(", "0"],
        ["check", "(<X>X<X>)<<X>X<X>>", "0"],
        ["check", "0"],
        ["nf", "a!(0) |"],
        ["check", "0", "0", "--free", "x:proc->proc"],
        ["check", "--batch", "/nonexistent/file"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_parse_error_mentions_position(capsys):
    _, _, err = run(capsys, "nf", "a!(0) | )")
    assert "offset 8" in err


def test_free_declarations(capsys):
    assert run(capsys, "check", "F<0>", "F<0 | 0>", "--free", "F:proc->proc", "--mode", "both")[0] == 0
    assert run(capsys, "check", "F | 0", "F", "--free", "F:proc->proc")[0] == 2


def test_batch(tmp_path, capsys):
    f = tmp_path / "pairs.txt"
    f.write_text("# comment\na(X).a(X).0 ;; a(X).0 | a(X).0\n\na!(0) ;; b!(0)\nbroken\n")
    code, out, err = run(capsys, "check", "--batch", str(f), "--mode", "both")
    assert out.splitlines() == ["2\tbisimilar", "4\tnot-bisimilar", "5\terror"]
    assert code == 2 and "line 5" in err


def test_batch_from_stdin(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("0 ;; 0 | 0\n"))
    code, out, _ = run(capsys, "check", "--batch", "-", "--json")
    assert code == 0 and json.loads(out)["fast"] is True


def test_nf_and_dump(capsys):
    code, out, _ = run(capsys, "nf", "a(X).(0 | a(X).0)", "--dump-tree")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "a(X1).0 | a(X1).0"
    assert lines[1:] == ["0 zero -", "1 inp a 0", "2 par - 1 1"]


def test_primes(capsys):
    assert run(capsys, "primes", "a!(0) | a!(0)")[1].splitlines() == ["a!(0)", "a!(0)"]
    assert run(capsys, "primes", "0")[1].strip() == "(none)"


def test_trace_of_nil(capsys):
    code, out, _ = run(capsys, "trace", "0")
    assert code == 0 and "(no transitions)" in out


def test_trace_branches(capsys):
    _, out, _ = run(capsys, "trace", "a!(0) | a(X).X", "--max-steps", "1", "--json")
    actions = sorted(step["action"] for step in json.loads(out)["trace"])
    assert actions == ["a!(0)", "a(X)", "tau"]


def test_trace_of_the_protocol(capsys):
    _, out, _ = run(capsys, "trace", protocol.SYSTEM, "--max-steps", "3", "--tau", "--json")
    level, states = json.loads(out)["trace"], []
    while level:
        assert len(level) == 1
        states.append(level[0]["target"])
        level = level[0]["next"]
    assert len(states) == 3
    for got, want in zip(states, protocol.STEPS):
        assert struct_congruent(parse(got), parse(want))


def test_selftest_is_reproducible(capsys):
    a = json.loads(run(capsys, "selftest", "--max-nodes", "3", "--random", "30", "--samples", "50", "--json", "--seed", "4")[1])
    b = json.loads(run(capsys, "selftest", "--max-nodes", "3", "--random", "30", "--samples", "50", "--json", "--seed", "4")[1])
    assert a["disagreements"] == []
    for key in ("terms", "classes", "oracle_calls", "cross_samples"):
        assert a[key] == b[key]


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "100,300", "--repeat", "1")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "n,time_ms,nodes,verdict_count"
    assert len(rows) == 3 and all(r.endswith(",1") for r in rows[1:])


def test_console_script_entry_point():
    done = subprocess.run(
        [sys.executable, "-m", "hobisim.cli", "check", "a!(0)", "a!(0) | 0"], capture_output=True, text=True
    )
    assert done.returncode == 0 and done.stdout.startswith("bisimilar")
