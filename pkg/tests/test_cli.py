from __future__ import annotations

import io
import json
import shlex
import sys
from pathlib import Path

import pytest

from metzsign.cli import run

MATRICES = Path(__file__).resolve().parent.parent / "matrices"

EXPECTED_EXIT = {
    "block": 0,
    "block_modified": 1,
    "chain_inverse": 0,
    "cycle3x3": 0,
    "delay_ct": 0,
    "delay_dt": 1,
    "ergodic": 2,
    "hull": 0,
    "impulsive": 0,
    "kerb": 0,
    "lplus": 0,
    "mixed_v1": 0,
    "mixed_v2": 1,
    "nilpotent": 0,
    "nonlinear": 2,
    "sample": 0,
    "switched": 0,
    "triangular": 0,
    "two_cycle": 1,
    "witness": 1,
}


def command_of(path: Path) -> list[str]:
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first.startswith("# command:")
    return shlex.split(first.split(":", 1)[1])


def invoke(argv: list[str], stdin: str | None = None) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin)
        try:
            code = run(argv, out, err)
        finally:
            sys.stdin = old
    else:
        code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_every_example_file_has_an_expected_exit_code():
    assert {p.stem for p in MATRICES.glob("*.txt")} == set(EXPECTED_EXIT)


@pytest.mark.parametrize("stem", sorted(EXPECTED_EXIT))
def test_example_files(stem):
    path = MATRICES / f"{stem}.txt"
    code, out, err = invoke(command_of(path) + ["--input", str(path), "--json"])
    assert code == EXPECTED_EXIT[stem], err
    doc = json.loads(out)
    assert set(doc) == {"command", "inputs", "verdict", "statements", "certificates", "witnesses",
                        "diagnostics", "version"}
    assert doc["verdict"] == {0: "holds", 1: "fails", 2: "unknown"}[code]


def test_two_cycle_reports_witness():
    code, out, _ = invoke(["check", "--input", str(MATRICES / "two_cycle.txt"), "--json"])
    assert code == 1 and json.loads(out)["witnesses"]["cycle"] == [0, 1, 0]


def test_json_is_byte_stable():
    for path in sorted(MATRICES.glob("*.txt")):
        argv = command_of(path) + ["--input", str(path), "--json", "--seed", "7"]
        assert invoke(argv)[1] == invoke(argv)[1]


def test_stdin_and_text_output():
    code, out, _ = invoke(["check"], stdin="@A\n- +\n0 -\n")
    assert code == 0 and out.startswith("check: holds")


def test_usage_and_input_errors(tmp_path):
    assert invoke([])[0] == 64
    assert invoke(["frobnicate"])[0] == 64
    assert invoke(["check", "--samples", "-1"], stdin="@A\n-\n")[0] == 64
    assert invoke(["check", "--input", str(tmp_path / "missing.txt")])[0] == 66
    code, _, err = invoke(["check"], stdin="@A\n- +\n0\n")
    assert code == 65 and "line 3" in err
    code, _, err = invoke(["check"], stdin="@A\n- -\n+ -\n")
    assert code == 65 and "not Metzler" in err


def test_dot_export(tmp_path):
    target = tmp_path / "g.dot"
    code, _, _ = invoke(["check", "--input", str(MATRICES / "two_cycle.txt"), "--dot", str(target)])
    assert code == 1
    assert target.read_text() == "digraph D {\n  0;\n  1;\n  0 -> 1;\n  1 -> 0;\n}\n"


def test_version_flag():
    assert invoke(["--version"])[0] == 0
