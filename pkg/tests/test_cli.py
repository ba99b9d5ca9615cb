import json
import subprocess
import sys

import numpy as np
import pytest

from semikernel import oracle, oscint
from semikernel.cli import main
from semikernel.model import OperatorSpec, ZoneLabel
from semikernel.weyl import weyl_kernel


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_zone_example(capsys):
    code, out, _ = run(capsys, "zone", "--h", "0.05", "--x", "0.01", "0", "--y", "0", "0")
    assert code == 0
    assert out.strip() == "Singular"


def test_kernel_json(capsys):
    code, out, _ = run(capsys, "kernel", "--h", "0.05", "--x", "0.1", "0", "--y", "0", "0")
    doc = json.loads(out)
    assert code == 0
    assert doc["value"] == oracle.toy_kernel(OperatorSpec.toy(2, 0.05), (0.1, 0), (0, 0)).value


def test_kernel_grid_1d(capsys):
    code, out, _ = run(capsys, "kernel", "--h", "0.2", "--d", "1", "--x", "0", "--y", "0", "--method", "grid", "--box", "3", "--n", "300")
    assert code == 0
    assert json.loads(out)["method"] == "oracle-grid"


@pytest.mark.parametrize("route", ["closed", "quadrature"])
def test_weyl_json(capsys, route):
    code, out, _ = run(capsys, "weyl", "--h", "0.05", "--x", "0.1", "0", "--y", "0", "0.05", "--route", route)
    ref = weyl_kernel(OperatorSpec.toy(2, 0.05), (0.1, 0), (0, 0.05)).value
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(ref, rel=1e-8)


def test_weyl_catalog(capsys):
    code, out, _ = run(capsys, "weyl", "--h", "0.05", "--tau", "0.5", "--potential", "flat", "--x", "0", "0", "--y", "0", "0")
    assert code == 0
    # flat potential: volume of the radius-1 disk over (2 pi h)^2
    assert json.loads(out)["value"] == pytest.approx(np.pi / (2 * np.pi * 0.05) ** 2, rel=1e-10)


@pytest.mark.parametrize("method", ["contour", "quadrature"])
def test_corr_json(capsys, method):
    code, out, _ = run(capsys, "corr", "--h", "0.05", "--x", "0.1", "0", "--y", "0", "0", "--method", method)
    ref = oscint.corr_term(OperatorSpec.toy(2, 0.05), (0.1, 0), (0, 0))
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(ref, rel=1e-6)


def test_corr_diag_needs_diagonal(capsys):
    code, _, err = run(capsys, "corr", "--h", "0.05", "--x", "0.1", "0", "--y", "0", "0", "--method", "diag")
    assert code == 1
    assert json.loads(err)["error"] == "DomainError"


def test_rays_csv(capsys):
    code, out, _ = run(capsys, "rays", "--xbar", "0.5", "0", "--xi2", "0.5", "--n", "3")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "t,x1,x2,xi1,xi2"
    t, x1, x2, xi1, xi2 = map(float, lines[-1].split(","))
    assert (t, x2, xi2) == (1.0, 0.5, 0.5)
    assert x1 == pytest.approx(0.5 - np.sqrt(0.75) + 0.5, abs=1e-14)
    assert xi1 == pytest.approx(1 - np.sqrt(0.75), abs=1e-14)


def test_rays_error_prints_no_header(capsys):
    code, out, err = run(capsys, "rays", "--xbar", "0", "0", "--xi2", "0.5")
    assert code == 1
    assert out == ""
    assert json.loads(err)["command"] == "rays"


def test_numeric_error_exit_1(capsys):
    code, out, err = run(capsys, "kernel", "--h", "0.04", "--k", "1", "--x", "0", "0", "--y", "0", "0")
    assert code == 1
    assert out == ""
    assert json.loads(err)["error"] == "DomainError"


@pytest.mark.parametrize(
    "argv",
    [["kernel", "--x", "0", "0", "--y", "0", "0"], ["weyl", "--h", "abc", "--x", "0", "--y", "0"], ["zone"], ["rays", "--xbar", "0", "0", "--xi2", "0", "--n", "1"], ["validate", "--only", "11"], ["bogus"]],
)
def test_usage_error_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_study_command(capsys, tmp_path):
    ini = tmp_path / "s.ini"
    ini.write_text("[operator]\nkind = toy\n[study]\nh_values = 0.04 0.02 0.01\napproximations = weyl\n[pair a]\nx = 0.3 0\ny = 0.25 0.1\n")
    out_csv = tmp_path / "res.csv"
    code, out, _ = run(capsys, "study", "--config", str(ini), "--output", str(out_csv))
    assert code == 0
    fits = [json.loads(line) for line in out.splitlines()]
    assert [f["pair"] for f in fits] == ["a"]
    assert out_csv.exists() and out_csv.with_suffix(".json").exists()


def test_study_bad_config(capsys, tmp_path):
    code, _, err = run(capsys, "study", "--config", str(tmp_path / "missing.ini"))
    assert code == 1
    assert json.loads(err)["error"] == "ConfigurationError"


def test_validate_only(capsys):
    code, out, _ = run(capsys, "validate", "--only", "1")
    assert code == 0
    assert "PASS" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "semikernel", "zone", "--h", "0.05", "--x", "0.5", "0", "--y", "0", "0.4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() in {label.value for label in ZoneLabel}
