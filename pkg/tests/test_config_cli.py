import csv
import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GAUSS, grid
from nldw.cli import main
from nldw.config import TRIALS, ConfigError, RunConfig
from nldw.fields import ScalarField3D, gaussian, load_field, save_field
from nldw.minimize import SWEEP_HEADER
from nldw.svg import line_plot
from nldw.verify import check_I_curve

# ------------------------------------------------------------ config

finite = st.floats(1e-6, 1e3, allow_nan=False)


@given(
    Z=st.floats(0.0, 10.0), M=finite, n=st.sampled_from([8, 16, 48]), L=st.floats(1.0, 50.0),
    masses=st.lists(finite, max_size=5).map(tuple), max_iters=st.integers(0, 10**6),
    trials=st.lists(st.sampled_from(TRIALS), min_size=1, max_size=3, unique=True).map(tuple),
    init=st.sampled_from(["gaussian", "ball", "bump", "runs/a.nldw"]),
)
def test_config_round_trip(Z, M, n, L, masses, max_iters, trials, init):
    c = RunConfig(Z=Z, M=M, n=n, L=L, masses=masses, max_iters=max_iters, trials=trials, init=init)
    assert RunConfig.parse(c.to_text()) == c
    assert json.loads(c.to_json())["Z"] == Z


def test_config_parse_comments_and_defaults():
    c = RunConfig.parse("# a run\nZ = 2   # charge\n\nmasses = 0.1, 0.2\n")
    assert c.Z == 2.0 and c.masses == (0.1, 0.2) and c.n == 48
    assert RunConfig.parse("masses =\n").masses == ()


@pytest.mark.parametrize(
    "text",
    ["bogus = 1\n", "Z = 1\nZ = 2\n", "Z 1\n", "n = many\n", "masses = 0.1, x\n", "n = 7\n", "trials = abs, nope\n"],
)
def test_config_rejects_bad_input(text):
    with pytest.raises(ConfigError):
        RunConfig.parse(text)


def test_config_load_missing(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "absent.txt")


def test_config_params_validation():
    with pytest.raises(ConfigError):
        RunConfig(M=-1.0).params()
    p = RunConfig(Z=0.5, M=3.0, n=32, L=8.0).params()
    assert p.grid == grid(32, 8.0) and p.M == 3.0


# --------------------------------------------------------------- svg


def test_svg_plot_is_wellformed():
    svg = line_plot([0, 0.5, 1.0], [0.0, -0.3, -0.5], ["converged", "mass_escape", "failed"], title="t")
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert svg.count("<circle") == 3 + 4  # points plus one legend marker per status
    assert "mass_escape" in svg


def test_svg_plot_skips_nonfinite():
    root = ET.fromstring(line_plot([0.0, 1.0], [0.0, math.nan], ["converged", "failed"]))
    assert root is not None


# --------------------------------------------------------------- cli


def _run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_energy_zero_field(tmp_path, capsys):
    f = tmp_path / "zero.nldw"
    save_field(f, ScalarField3D.zeros(grid(16, 8.0)))
    code, out, _ = _run(["energy", "--field", f], capsys)
    assert code == 0
    d = json.loads(out)
    assert d == {"gradient": 0.0, "double_well": 0.0, "attraction": 0.0, "coulomb": 0.0, "total": 0.0}
    assert not (tmp_path / "config.txt").exists()


def test_cli_energy_gaussian(tmp_path, capsys):
    f = tmp_path / "g.nldw"
    save_field(f, gaussian(grid(96, 12.0)))
    code, out, _ = _run(["energy", "--field", f, "--Z", 1, "--out", tmp_path / "o"], capsys)
    assert code == 0
    d = json.loads(out)
    for k in ("gradient", "double_well", "attraction", "coulomb"):
        assert abs(d[k] / GAUSS[k] - 1) <= 5e-4
    assert (tmp_path / "o" / "energy.json").exists()
    assert (tmp_path / "o" / "config.json").exists()


def test_cli_energy_bad_checkpoints(tmp_path, capsys):
    f = tmp_path / "g.nldw"
    save_field(f, ScalarField3D.zeros(grid(16, 8.0)))
    raw = f.read_bytes()
    (tmp_path / "t.nldw").write_bytes(raw[:-100])
    (tmp_path / "m.nldw").write_bytes(b"ABCD" + raw[4:])
    for name in ("t.nldw", "m.nldw", "absent.nldw"):
        code, _, err = _run(["energy", "--field", tmp_path / name], capsys)
        assert code == 2 and "error" in err
    code, _, _ = _run(["energy"], capsys)
    assert code == 2


def test_cli_bad_arguments(tmp_path, capsys):
    assert _run(["frobnicate"], capsys)[0] == 2
    assert _run(["minimize", "--n", "abc"], capsys)[0] == 2
    assert _run(["sweep", "--jobs", 0], capsys)[0] == 2
    cfg = tmp_path / "bad.txt"
    cfg.write_text("unknown_key = 3\n")
    assert _run(["minimize", "--config", cfg, "--out", tmp_path / "o"], capsys)[0] == 2
    assert _run(["minimize", "--M", -1, "--out", tmp_path / "o"], capsys)[0] == 2


@pytest.fixture(scope="module")
def minimized(tmp_path_factory):
    out = tmp_path_factory.mktemp("min")
    code = main(["minimize", "--Z", "1", "--M", "0.5", "--out", str(out)])
    return code, out


def test_cli_minimize_converges(minimized):
    code, out = minimized
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["status"] == "converged" and rep["energy"]["total"] < 0
    assert rep["solver"]["padded_shape"] == [96, 96, 96]
    u = load_field(out / "final.nldw")
    assert u.grid == grid(48, 12.0)
    assert RunConfig.parse((out / "config.txt").read_text()) == RunConfig(Z=1.0, M=0.5)


def test_cli_config_echo_reproduces_run(minimized, tmp_path):
    _, out = minimized
    code = main(["minimize", "--config", str(out / "config.txt"), "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "config.txt").read_bytes() == (out / "config.txt").read_bytes()
    assert (tmp_path / "final.nldw").read_bytes() == (out / "final.nldw").read_bytes()


def test_cli_minimize_iteration_cap(tmp_path, capsys):
    code, out, _ = _run(["minimize", "--max-iters", 1, "--n", 32, "--out", tmp_path], capsys)
    assert code == 4 and "status=max_iters" in out


def test_cli_minimize_mass_escape(tmp_path, capsys):
    code, out, _ = _run(["minimize", "--Z", 0.5, "--M", 50, "--out", tmp_path], capsys)
    assert code == 3 and "status=mass_escape" in out


def test_cli_minimize_from_checkpoint(minimized, tmp_path, capsys):
    _, out = minimized
    code, text, _ = _run(["minimize", "--init", out / "final.nldw", "--out", tmp_path], capsys)
    assert code == 0
    assert json.loads((tmp_path / "report.json").read_text())["iterations"] <= 1


def test_cli_verify_without_checkpoint(tmp_path, capsys):
    code, out, _ = _run(["verify", "--n", 32, "--out", tmp_path], capsys)
    assert code == 0
    data = json.loads((tmp_path / "verify.json").read_text())
    by = {d["name"]: d for d in data}
    assert by["mass_bound_l2"]["skipped"]
    assert by["ims_split_disjoint"]["passed"]
    assert "threshold_consistency" in (tmp_path / "verify.txt").read_text()


def test_cli_verify_with_minimizer(minimized, tmp_path, capsys):
    _, out = minimized
    code, _, _ = _run(["verify", "--field", out / "final.nldw", "--out", tmp_path], capsys)
    assert code == 0
    by = {d["name"]: d for d in json.loads((tmp_path / "verify.json").read_text())}
    for name in ("mass_bound_l2", "mass_bound_coulomb"):
        assert by[name]["passed"] and by[name]["hard"] and not by[name]["skipped"]


def test_cli_verify_corrupted_checkpoint(tmp_path, capsys):
    f = tmp_path / "c.nldw"
    f.write_bytes(b"NLDW" + b"\x00" * 7)
    assert _run(["verify", "--field", f, "--out", tmp_path / "o"], capsys)[0] == 2


def test_cli_sweep(tmp_path, capsys):
    code, out, _ = _run(["sweep", "--masses", "0,0.5,1.0", "--out", tmp_path], capsys)
    assert code == 0
    rows = list(csv.reader((tmp_path / "sweep.csv").open()))
    assert rows[0] == SWEEP_HEADER and len(rows) == 4
    curve = [(float(r[0]), float(r[1])) for r in rows[1:]]
    assert curve[0] == (0.0, 0.0)
    assert check_I_curve(curve, 1.0, 10.0).passed
    ET.fromstring((tmp_path / "sweep.svg").read_text())


def test_cli_sweep_single_and_empty(tmp_path, capsys):
    code, _, _ = _run(["sweep", "--masses", "0.3", "--n", 24, "--out", tmp_path], capsys)
    assert code == 0
    assert len(list(csv.reader((tmp_path / "sweep.csv").open()))) == 2
    assert _run(["sweep", "--masses", "", "--out", tmp_path / "e"], capsys)[0] == 2
    assert _run(["sweep", "--masses", "0.5,0.2", "--out", tmp_path / "e"], capsys)[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nldw", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "minimize" in r.stdout
