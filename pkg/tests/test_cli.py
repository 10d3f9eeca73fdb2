import json
import subprocess
import sys

import pytest

from moduli_tower.cli import run
from moduli_tower.core import Level
from moduli_tower.divisors import DivisorClass, a_alpha_class, canonical_class
from moduli_tower.hassett_trees import CombCurveType


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- golden text ------------------------------------------------------------------

GOLDEN = {
    ("lc", "model", "--n", "9", "--alpha", "1/2"): "WeightLevel(1)\n",
    ("lc", "model", "--n", "9", "--alpha", "3/10"): "GITQuotient\n",
    ("div", "basis", "--n", "6", "--k", "1", "--verify"): None,  # checked below
    ("git", "classify", "--n", "6", "--blocks", "1,2,3|4,5,6"): "1,2,3|4,5,6: strictly_semistable (closed orbit)\n",
    ("pair", "--n", "6", "--curve", "1|2|3,4|5,6", "--a-alpha", "1"): "a\n",
    ("tower", "schedule", "--n", "5"): (
        "stage 1: |S|=5, 1 components, codim 4, +1\n"
        "stage 2: |S|=4, 5 components, codim 3, +5\n"
        "stage 3: |S|=3, 10 components, codim 2, +10\n"
    ),
    ("tower", "ledger", "--n", "8"): (
        "level               rank  recursive  source\n"
        "GITQuotient            8          8  git\n"
        "WeightLevel(1)        43         43  even\n"
        "WeightLevel(2)        99         99  even\n"
        "top expected 2^(n-1)-C(n,2)-1 = 99: OK\n"
    ),
    ("nef", "table", "--n", "9", "--k", "1"): (
        "C_1: engine -a + 1 | closed form -a + 1\n"
        "C_2: engine 5a - 2 | closed form 5a - 2\n"
        "C_3: engine 0 | closed form 0\n"
        "all rows agree\n"
    ),
    ("trees", "enumerate", "--n", "5", "--weights", "sym:1", "--count"): (
        "26 stable types; by number of edges: 0: 1, 1: 10, 2: 15\n"
    ),
}


@pytest.mark.parametrize("argv", [k for k, v in GOLDEN.items() if v is not None])
def test_golden_text(capsys, argv):
    code, out, _ = call(capsys, *argv)
    assert code == 0
    assert out == GOLDEN[argv]


def test_basis_verify(capsys):
    code, out, _ = call(capsys, "div", "basis", "--n", "6", "--k", "1", "--verify")
    assert code == 0
    assert "rank 16 / expected 16: OK" in out


def test_nef_threshold_text(capsys):
    code, out, _ = call(capsys, "nef", "threshold", "--n", "6", "--k", "1")
    assert code == 0
    assert "1/2" in out and "1|2|3|4,5,6" in out


# -- exit codes -------------------------------------------------------------------

@pytest.mark.parametrize(
    "argv,expected",
    [
        (["lc", "model", "--n", "9", "--alpha", "1/5"], 3),
        (["lc", "model", "--n", "9", "--alpha", "0.5"], 2),
        (["lc", "model", "--n", "9", "--alpha", "1/0"], 2),
        (["lc", "model", "--n", "9"], 2),
        (["nosuch"], 2),
        (["div", "canonical", "--n", "9", "--k", "4"], 3),
        (["div", "symmetric", "--n", "9", "--k", "2", "--j", "3"], 0),
        (["div", "symmetric", "--n", "9", "--k", "2", "--j", "2"], 0),
        (["pair", "--n", "6", "--curve", "1|2|3"], 3),
        (["tower", "ledger", "--n", "4"], 3),
        (["tower", "centers", "--n", "9", "--k", "0"], 3),
        (["nef", "threshold", "--n", "13", "--k", "1"], 3),
        (["git", "classify", "--n", "4", "--blocks", "1,2,3,4,5"], 3),
    ],
)
def test_exit_codes(capsys, argv, expected):
    code, _, err = call(capsys, *argv)
    assert code == expected
    if expected:
        assert err


# -- JSON -------------------------------------------------------------------------

JSON_COMMANDS = [
    ["git", "classify", "--n", "6", "--blocks", "1,2,3|4,5,6"],
    ["git", "count", "--n", "6"],
    ["trees", "enumerate", "--n", "5", "--weights", "sym:1/2"],
    ["trees", "inventory", "--n", "7", "--k", "1"],
    ["div", "alpha", "--n", "6", "--k", "1"],
    ["div", "canonical", "--n", "9", "--k", "2"],
    ["div", "basis", "--n", "7", "--k", "1"],
    ["nef", "threshold", "--n", "6", "--k", "1"],
    ["nef", "table", "--n", "8", "--k", "1"],
    ["lc", "model", "--n", "9", "--alpha", "1/2"],
    ["tower", "schedule", "--n", "6"],
    ["tower", "ledger", "--n", "8"],
    ["tower", "transitions", "--n", "8"],
    ["tower", "centers", "--n", "9", "--k", "1"],
]


@pytest.mark.parametrize("argv", JSON_COMMANDS, ids=lambda a: " ".join(a[:2]))
def test_json_round_trip(capsys, argv):
    code, out, _ = call(capsys, "--json", *argv)
    assert code == 0
    data = json.loads(out)
    assert json.loads(json.dumps(data)) == data
    # no floats anywhere in the output
    def walk(x):
        assert not isinstance(x, float)
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
    walk(data)


def test_class_json_reparses_to_equal_class(capsys):
    _, out, _ = call(capsys, "--json", "div", "alpha", "--n", "7", "--k", "1")
    assert DivisorClass.from_json(out) == a_alpha_class(7, 1)
    _, out, _ = call(capsys, "--json", "div", "canonical", "--n", "9", "--k", "2")
    assert DivisorClass.from_json(out) == canonical_class(Level(9, 2))


def test_class_feeds_back_in(capsys, tmp_path):
    _, out, _ = call(capsys, "--json", "div", "canonical", "--n", "8", "--k", "1")
    path = tmp_path / "k.json"
    path.write_text(out)
    code, up, _ = call(capsys, "--json", "div", "pullback", "--class-file", str(path), "--to-k", "2")
    assert code == 0
    lifted = DivisorClass.from_json(up)
    assert lifted.level == Level(8, 2)
    (tmp_path / "up.json").write_text(up)
    code, down, _ = call(capsys, "--json", "div", "pushforward", "--class-file", str(tmp_path / "up.json"), "--to-k", "1")
    assert code == 0
    assert DivisorClass.from_json(down) == DivisorClass.from_json(out)


def test_trees_json_reparses(capsys):
    _, out, _ = call(capsys, "--json", "trees", "enumerate", "--n", "5", "--weights", "sym:1")
    data = json.loads(out)
    types = data["types"] if isinstance(data, dict) else data
    for t in types:
        assert CombCurveType.from_dict(t).to_dict() == t


def test_json_flag_after_subcommand(capsys):
    _, a, _ = call(capsys, "--json", "lc", "model", "--n", "9", "--alpha", "1/2")
    _, b, _ = call(capsys, "lc", "model", "--n", "9", "--alpha", "1/2", "--json")
    assert a == b


# -- determinism and help ------------------------------------------------------------

def test_determinism_across_processes():
    argv = [sys.executable, "-m", "moduli_tower", "--json", "nef", "threshold", "--n", "7", "--k", "1"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second


def test_help_documents_grammars(capsys):
    code, out, _ = call(capsys, "--help")
    assert code == 0
    for word in ("rational", "subset", "blocks", "curve", "weights", "Exit codes"):
        assert word in out


def test_max_n_env_override(monkeypatch, capsys):
    assert call(capsys, "nef", "threshold", "--n", "6", "--k", "1")[0] == 0
    monkeypatch.setenv("MODULI_MAX_N", "5")
    code, _, err = call(capsys, "nef", "threshold", "--n", "6", "--k", "1")
    assert code == 3
    assert "MODULI_MAX_N" in err
