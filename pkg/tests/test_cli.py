"""Command-line behavior: subcommands, exit codes, determinism."""

import json
from pathlib import Path

import pytest

from tdlek.cli import main

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


def test_parse_prints_canonical_form(capsys):
    code, out, err = run(capsys, "parse", "B (raining( 2 , 2 ))")
    assert code == 0
    assert out == "B(raining(2,2))\n"
    assert err == ""


def test_parse_dump_emits_json(capsys):
    code, out, _ = run(capsys, "parse", "--dump", "p(1,2)")
    assert code == 0
    lines = out.splitlines()
    assert json.loads(lines[1])["node"] == "atom"


def test_parse_error_exits_2(capsys):
    code, out, err = run(capsys, "parse", "p(5,2)")
    assert code == 2
    assert "parse error" in err


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.tlek"
    path.write_text(
        "worlds:\n"
        "  w0: raining(2,2) s(0,9)\n"
        "  w1: s(0,9)\n"
        "classes:\n"
        "  w0 w1\n"
        "nbhd:\n"
        "  w0: {w0}\n"
        "  w1: {w0}\n"
    )
    return str(path)


def test_check_true_and_false(capsys, model_file):
    code, out, _ = run(capsys, "check", "-m", model_file, "-w", "w0", "B(raining(2,2))")
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, "check", "-m", model_file, "-w", "w1", "raining(2,2)")
    assert (code, out) == (0, "false\n")


def test_check_dynamic_formula(capsys, model_file):
    code, out, _ = run(capsys, "check", "-m", model_file, "-w", "w1", "[+s(0,9)] B s(0,9)")
    assert (code, out) == (0, "true\n")


def test_check_bad_world_exits_2(capsys, model_file):
    code, _, err = run(capsys, "check", "-m", model_file, "-w", "nope", "p(1,1)")
    assert code == 2
    assert "no world" in err


def test_check_missing_model_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "check", "-m", str(tmp_path / "none.tlek"), "-w", "w0", "p(1,1)")
    assert code == 2


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------


def test_reduce_prints_static_formula(capsys):
    code, out, _ = run(capsys, "reduce", "[+p(1,1)] B p(1,1)")
    assert code == 0
    assert out == "B(p(1,1)) | K(p(1,1) <-> p(1,1))\n"


def test_reduce_unreducible_exits_1(capsys):
    code, _, err = run(capsys, "reduce", "[rev(p(1,2),q(0,9))] B q(0,0)")
    assert code == 1
    assert "unreducible" in err


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def test_run_marriage_scenario(capsys):
    code, out, err = run(capsys, "run", str(SCENARIO_DIR / "marriage.scn"))
    assert code == 0
    assert "married(6,8)" in out
    assert "divorced(9,inf)" in out
    assert err == ""


def test_run_emits_trace(capsys, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, _, _ = run(capsys, "run", str(SCENARIO_DIR / "umbrella.scn"), "--trace", str(trace))
    assert code == 0
    lines = trace.read_text().splitlines()
    assert json.loads(lines[0]) == {"schema_version": 1}
    assert any(json.loads(l)["event"] == "fired" for l in lines[1:])


def test_run_expect_mismatch_exits_1(capsys, tmp_path):
    scn = tmp_path / "bad.scn"
    scn.write_text("perceive p(1,1) @ 1\nquery B(p(2,2))\nexpect true\n")
    code, out, err = run(capsys, "run", str(scn))
    assert code == 1
    assert "expect mismatch" in err


def test_run_scenario_error_exits_2(capsys, tmp_path):
    scn = tmp_path / "broken.scn"
    scn.write_text("perceive p(1,1)\n")
    code, _, err = run(capsys, "run", str(scn))
    assert code == 2
    assert "line 1" in err


# ---------------------------------------------------------------------------
# rand-test
# ---------------------------------------------------------------------------


def test_rand_test_suites_small(capsys):
    for suite in ("frame", "axioms-lek", "property1", "reduction-oracle"):
        code, out, err = run(capsys, "rand-test", suite, "--count", "20", "--seed", "3")
        assert code == 0, (suite, err)
        assert suite in out


def test_rand_test_deterministic_output(capsys):
    argv = ["rand-test", "reduction-oracle", "--count", "30", "--seed", "11"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_usage_error_exits_2(capsys):
    assert main(["rand-test", "unknown-suite"]) == 2
    assert main([]) == 2
