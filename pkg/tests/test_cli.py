import json
import subprocess
import sys

import pytest

from derived_kernel.cli import main
from derived_kernel.specfiles import parse_module, parse_scheme, parse_triple

P1_SCHEME = "ambient = 1\ndescription = the projective line\n"

DBL_SCHEME = """\
ambient = 1
description = derived double point
section = x0 : 1
section = x0 : 1
"""

POINT_MOD = """\
# structure sheaf of V(x0) as a cone
generator = g0 : h=0 : a=0
generator = g1 : h=1 : a=1
d = g1 -> g0 : x0
"""

EULER_TRIPLE = """\
[module F]
generator = f0 : h=0 : a=2
[module G]
generator = g0 : h=0 : a=1
generator = g1 : h=0 : a=1
[module H]
generator = h0 : h=0 : a=0
[map f]
source = F
target = G
entry = f0 -> g0 : x1
entry = f0 -> g1 : -1*x0
[map g]
source = G
target = H
entry = g0 -> h0 : x0
entry = g1 -> h0 : x1
"""


@pytest.fixture
def files(tmp_path):
    p1 = tmp_path / "p1.scheme"
    p1.write_text(P1_SCHEME)
    dbl = tmp_path / "dbl.scheme"
    dbl.write_text(DBL_SCHEME)
    point = tmp_path / "point.mod"
    point.write_text(POINT_MOD)
    euler = tmp_path / "euler.triple"
    euler.write_text(EULER_TRIPLE)
    return {"p1": str(p1), "dbl": str(dbl), "point": str(point),
            "euler": str(euler), "dir": tmp_path}


def run_cli(argv, out_path):
    code = main(argv + ["--out", str(out_path)])
    if code:
        return code, None
    return 0, json.loads(out_path.read_text())


def test_scheme_and_module_parsing(files):
    dga = parse_scheme(DBL_SCHEME)
    assert dga.base.n == 1 and dga.r == 2
    p1 = parse_scheme(P1_SCHEME)
    m = parse_module(POINT_MOD, p1)
    assert m.gens == ((0, 0), (1, 1))
    f, g = parse_triple(EULER_TRIPLE, p1)
    assert f.target is g.source


def test_cohomology_command(files, tmp_path):
    code, out = run_cli(["cohomology", "--scheme", files["p1"],
                         "--sheaf", "O", "--twist", "-2"],
                        tmp_path / "r.json")
    assert code == 0
    assert out["cohomology"] == {"0": 0, "1": 1}
    assert out["stable"] == {"0": True, "1": True}


def test_k0_group_command(files, tmp_path):
    code, out = run_cli(["k0-group", "--scheme", files["p1"],
                         "--window=-3:0"], tmp_path / "r.json")
    assert code == 0
    assert out["group"]["free_rank"] == 2
    assert out["group"]["torsion"] == []


def test_resolve_command(files, tmp_path):
    code, out = run_cli(["resolve", "--scheme", files["p1"],
                         "--module", files["point"]], tmp_path / "r.json")
    assert code == 0
    assert out["resolution"]["terms"] == [[0], [-1]]
    assert out["resolution"]["steps"] == 1


def test_sections_command_derived(files, tmp_path):
    code, out = run_cli(["sections", "--scheme", files["dbl"],
                         "--sheaf", "O"], tmp_path / "r.json")
    assert code == 0
    assert out["homotopy"]["0"] == 1
    assert out["homotopy"]["1"] == 1


def test_spectral_command(files, tmp_path):
    code, out = run_cli(["spectral-sequence", "--scheme", files["p1"],
                         "--sheaf", "O(-2)"], tmp_path / "r.json")
    assert code == 0
    cells = {(c["p"], c["q"]): c["dim"] for c in out["pages"][1]["cells"]}
    assert cells.get((1, 0)) == 1
    assert out["homotopy"]["-1"] == 1


def test_exact_check_command(files, tmp_path):
    code, out = run_cli(["exact-check", "--scheme", files["p1"],
                         "--module", files["euler"]], tmp_path / "r.json")
    assert code == 0
    assert out["short_exact"] is True
    assert out["cofibre_equivalence"] is True
    assert out["agrees"] is True


def test_strong_and_twist_and_global(files, tmp_path):
    code, out = run_cli(["strong-check", "--scheme", files["dbl"],
                         "--sheaf", "O"], tmp_path / "r.json")
    assert code == 0 and out["verdict"] == "strong"
    code, out = run_cli(["twist-search", "--scheme", files["p1"],
                         "--sheaf", "O", "--index", "0", "--ceiling", "1"],
                        tmp_path / "r.json")
    assert code == 0 and out["n0"] == 0
    code, out = run_cli(["global-gen", "--scheme", files["p1"],
                         "--sheaf", "O(-1)", "--ceiling", "2"],
                        tmp_path / "r.json")
    assert code == 0 and out["n0"] == 1


def test_tor_amplitude_and_k0_class(files, tmp_path):
    code, out = run_cli(["tor-amplitude", "--scheme", files["p1"],
                         "--module", files["point"]], tmp_path / "r.json")
    assert code == 0
    assert out["upper_bound"] == 1 and out["method"] == "fitting"
    code, out = run_cli(["k0-class", "--scheme", files["p1"],
                         "--module", files["point"]], tmp_path / "r.json")
    assert code == 0
    assert out["class"] == {"basis": [-1, 0], "coeffs": [-1, 1]}


def test_verify_command(files, tmp_path):
    code, out = run_cli(["verify", "--scheme", files["p1"], "--seed", "3"],
                        tmp_path / "r.json")
    assert code == 0
    assert out["passed"] is True


def test_exit_code_parse_error(files, tmp_path):
    bad = files["dir"] / "bad.scheme"
    bad.write_text("ambient = 1\nsection = x0 + x1^2 : 2\n")
    code = main(["cohomology", "--scheme", str(bad), "--sheaf", "O"])
    assert code == 2
    code = main(["cohomology", "--scheme", str(files["dir"] / "nope"),
                 "--sheaf", "O"])
    assert code == 2


def test_exit_code_precondition(files, tmp_path):
    mod = files["dir"] / "shifted.mod"
    mod.write_text("generator = g0 : h=0 : a=0\nshift = -1\n")
    code = main(["cohomology", "--scheme", files["p1"],
                 "--module", str(mod)])
    assert code == 3


def test_exit_code_search_exhausted(files, tmp_path):
    mod = files["dir"] / "mixed.mod"
    mod.write_text(
        "generator = g0 : h=0 : a=0\ngenerator = g1 : h=1 : a=2\n")
    code = main(["twist-search", "--scheme", files["p1"],
                 "--module", str(mod), "--ceiling", "0"])
    assert code == 4


def test_report_determinism(files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["spectral-sequence", "--scheme", files["dbl"], "--sheaf", "O",
            "--seed", "7"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point(files, tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "derived_kernel.cli", "cohomology",
         "--scheme", files["p1"], "--sheaf", "O", "--twist", "3"],
        capture_output=True, text=True)
    assert out.returncode == 0
    data = json.loads(out.stdout)
    assert data["cohomology"]["0"] == 4
