import io
import json
import subprocess
import sys

import pytest

from oklab import bigcone, exactgeom, forms, gvf, okounkov, semigroups, toric
from oklab.cli import COMMANDS, run

CONFIGS = {"geometry": "cone", "semigroup": "gap", "fan+divisor": "p2_meet", "ideal": "ideal", "surface": "bl1p2",
           "form": "p1xp1_form", "gvf-measure": "qt", "chebyshev": "interval"}
OVERRIDES = {"okbody": "p2_o1", "pdc": "pdc", "calabi": "rectangle"}


def config_for(name):
    return f"configs/{OVERRIDES.get(name) or CONFIGS[COMMANDS[name].kind]}.toml"


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, json.loads(buf.getvalue())


@pytest.fixture(autouse=True)
def in_repo(monkeypatch, request):
    monkeypatch.chdir(request.config.rootpath)


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_every_command_runs_on_its_sample(name):
    code, doc = invoke(name, "--config", config_for(name))
    assert code == 0 and doc["status"] == "pass", doc
    assert {"version", "command", "seed", "config_sha256", "result"} <= set(doc)


def test_operations_exist():
    mods = (exactgeom, semigroups, toric, okounkov, forms, bigcone, gvf)
    for name, cmd in COMMANDS.items():
        for op in cmd.operations:
            assert any(callable(getattr(m, op, None)) for m in mods), (name, op)


def test_okbody_simplex():
    code, doc = invoke("okbody", "--config", "configs/p2_o1.toml")
    assert code == 0
    assert sorted(doc["result"]["body"]["vertices"]) == [[[0, 1], [0, 1]], [[0, 1], [1, 1]], [[1, 1], [0, 1]]]
    assert doc["result"]["volume"] == [1, 1]


def test_zariski_classes():
    _, doc = invoke("zariski", "--config", "configs/bl1p2.toml", "--class", "1,1")
    r = doc["result"]
    assert r["P"] == [[1, 1], [0, 1]] and r["N"] == [[0, 1], [1, 1]] and r["vol"] == [1, 1]
    _, doc = invoke("zariski", "--config", "configs/bl1p2.toml", "--class", "3,-1")
    assert doc["result"]["vol"] == [8, 1]


def test_product_formula_flag():
    code, doc = invoke("product-formula", "--config", "configs/qt.toml", "--f", "(t-1)/t")
    assert code == 0 and doc["result"]["residual"] == [0, 1]


def test_output_is_deterministic():
    cmd = [sys.executable, "-m", "oklab.cli", "product-formula", "--config", "configs/qt.toml", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["seed"] == 5


def test_unknown_key_is_config_error(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "surface"\n[surface]\nname = "bl1p2"\nbogus = 1\n')
    code, doc = invoke("zariski", "--config", str(bad), "--class", "1,1")
    assert code == 2 and doc["status"] == "config-error"


def test_wrong_kind_is_config_error():
    code, doc = invoke("zariski", "--config", "configs/qt.toml", "--class", "1,1")
    assert code == 2


def test_missing_file_is_config_error(tmp_path):
    code, _ = invoke("hull", "--config", str(tmp_path / "nope.toml"))
    assert code == 2


def test_library_failure_exits_one():
    # H - E is not big, so psi is undefined there
    code, doc = invoke("psi", "--config", "configs/bl1p2.toml", "--class", "1,-1")
    assert code == 1 and doc["status"] == "fail" and "error" in doc


def test_failed_check_exits_one(tmp_path):
    cfg = tmp_path / "id.toml"
    cfg.write_text('kind = "form"\n[form]\ngram = [[1, 0], [0, 1]]\n[query]\nsamples = [[1, 0], [0, 1], [1, 2]]\n')
    code, doc = invoke("axioms", "--config", str(cfg))
    assert code == 1 and doc["status"] == "fail"
