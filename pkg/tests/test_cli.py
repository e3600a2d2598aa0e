"""Config parsing, artifact determinism, sweeps, exit codes."""
import filecmp
import math
import os

import numpy as np
import pytest

from membranelab import (
    ConfigError,
    StabilityReport,
    SweepHypothesisError,
    SweepRow,
    hausdorff_distance,
    load_config,
    run,
    stability_sweep,
    write_json,
)
from membranelab.cli import main, selftest


BASE_INI = """
[domain]
x_min = -1.0
x_max = 1.0
y_min = -1.0
y_max = 1.0
n = 65

[problem]
lambda_plus = 2.0
lambda_minus = 2.0

[boundary]
kind = profile
beta1 = 1.0

[output]
dir = {out}
"""


def write_ini(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# Config loading
# ---------------------------------------------------------------------------


def test_load_config_happy_path(tmp_path):
    cfg = load_config(write_ini(tmp_path, BASE_INI.format(out=tmp_path / "out")))
    assert cfg.n == 65
    assert cfg.boundary_kind == "profile"
    assert cfg.tol_linear == 1e-10
    assert cfg.sweep is None
    g = cfg.grid()
    assert g.h == pytest.approx(2.0 / 64.0)


def test_load_config_inline_comments_and_sections(tmp_path):
    text = BASE_INI.format(out=tmp_path / "out") + """
[solver]
tol_linear = 1e-9   ; tighter would also work
max_sweeps = 50

[diagnostics]
run = phi_ladder, perimeter
point = 0.0, 0.0

[sweep]
family = sine
amplitudes = 0.2, 0.1
k = 2
"""
    cfg = load_config(write_ini(tmp_path, text))
    assert cfg.tol_linear == 1e-9 and cfg.max_sweeps == 50
    assert cfg.diagnostics == ("phi_ladder", "perimeter")
    assert cfg.sweep["family"] == "sine" and cfg.sweep["k"] == 2


@pytest.mark.parametrize("mutation, needle", [
    ("[domain]\nx_min = -1", "required section missing"),
    ("replace:n = 65\nn = 2", "at least 3 nodes"),
    ("replace:lambda_plus = 2.0\nlambda_plus = -1.0", "must be positive"),
    ("replace:kind = profile\nkind = cubic", "unknown kind"),
    ("append:[diagnostics]\nrun = swirl", "unknown diagnostic"),
    ("append:[diagnostics]\npoint = 1, 2, 3", "two coordinates"),
    ("append:[sweep]\nfamily = constant\namplitudes = 0.1, 0.2", "strictly decreasing"),
    ("append:[sweep]\nfamily = triangle\namplitudes = 0.1", "unknown family"),
    ("replace:beta1 = 1.0\nbeta1 = 1.0\ntau = 0.5", "boundary"),
])
def test_load_config_rejects_bad_inputs(tmp_path, mutation, needle):
    text = BASE_INI.format(out=tmp_path / "out")
    if mutation.startswith("replace:"):
        old, new = mutation[len("replace:"):].split("\n", 1)
        text = text.replace(old, new)
    elif mutation.startswith("append:"):
        text += "\n" + mutation[len("append:"):]
    else:
        # keep only a crippled [domain] section
        text = mutation + "\n[output]\ndir = x\n"
    with pytest.raises(ConfigError, match=needle):
        load_config(write_ini(tmp_path, text))


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.ini"))


# ---------------------------------------------------------------------------
# Deterministic writers
# ---------------------------------------------------------------------------


def test_write_json_golden_bytes(tmp_path):
    path = tmp_path / "g.json"
    write_json({"a": 1.5, "b": [1, 2.25], "c": {"d": True, "e": None}}, str(path))
    assert path.read_text() == (
        '{\n  "a": 1.5,\n  "b": [\n    1,\n    2.25\n  ],\n'
        '  "c": {\n    "d": true,\n    "e": null\n  }\n}\n'
    )


def test_write_json_uses_17_digit_floats(tmp_path):
    path = tmp_path / "f.json"
    write_json({"pi": math.pi}, str(path))
    assert "3.1415926535897931" in path.read_text()


# ---------------------------------------------------------------------------
# Hausdorff distance
# ---------------------------------------------------------------------------


def seg(a, b, k=2):
    t = np.linspace(0.0, 1.0, k)[:, None]
    return np.asarray(a) * (1 - t) + np.asarray(b) * t


def test_hausdorff_identical_is_zero():
    chains = [seg((0, 0), (1, 0), 5)]
    assert hausdorff_distance(chains, chains) == 0.0


def test_hausdorff_translation():
    a = [seg((0, 0), (1, 0), 9)]
    b = [seg((0.3, 0.4), (1.3, 0.4), 9)]
    assert hausdorff_distance(a, b) == pytest.approx(0.5, abs=1e-12)


def test_hausdorff_parallel_lines_with_densify():
    a = [seg((0, 0), (2, 0), 2)]       # endpoints only
    b = [seg((0, 0.25), (2, 0.25), 2)]
    assert hausdorff_distance(a, b) == pytest.approx(0.25, abs=1e-12)
    assert hausdorff_distance(a, b, max_spacing=0.05) == pytest.approx(0.25, abs=1e-12)


def test_hausdorff_empty_raises():
    with pytest.raises(ValueError):
        hausdorff_distance([], [seg((0, 0), (1, 0))])


# ---------------------------------------------------------------------------
# Stability report container
# ---------------------------------------------------------------------------


def make_row(delta):
    return SweepRow(delta, delta, 0.9 * delta, True, 0.1, ())


def test_stability_report_requires_decreasing_deltas():
    rows = (make_row(0.1), make_row(0.05))
    rep = StabilityReport(rows, True, 0.01, ((0.0, 0.0),), ("branch",))
    assert rep.to_json_dict()["hausdorff_monotone"] is True
    with pytest.raises(ValueError):
        StabilityReport((make_row(0.05), make_row(0.1)), True, 0.01, (), ())


# ---------------------------------------------------------------------------
# End-to-end runs
# ---------------------------------------------------------------------------

DIAG_INI = BASE_INI + """
[diagnostics]
run = phi_ladder, psi_ladder, classify, graphs, xi, perimeter, covering
point = 0.0, 0.0
window = 0.25
xi_r = 0.5
xi_m = 64
"""


def test_diagnose_writes_deterministic_artifacts(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    code = run(load_config(write_ini(tmp_path, DIAG_INI.format(out=out1), "a.ini")))
    assert code == 0
    code = run(load_config(write_ini(tmp_path, DIAG_INI.format(out=out2), "b.ini")))
    assert code == 0
    names = sorted(os.listdir(out1))
    assert names == sorted(os.listdir(out2))
    for want in ("field.csv", "solve_report.json", "free_boundary.csv",
                 "phi_ladder.csv", "psi_ladder.csv", "classification.json",
                 "graphs.json", "xi.csv", "perimeter.json", "covering.json"):
        assert want in names
    match, mismatch, errors = filecmp.cmpfiles(out1, out2, names, shallow=False)
    assert mismatch == [] and errors == []


def test_solve_mode_writes_field_only(tmp_path):
    out = tmp_path / "solve_out"
    cfg = load_config(write_ini(tmp_path, BASE_INI.format(out=out)))
    assert run(cfg, mode="solve") == 0
    names = sorted(os.listdir(out))
    assert names == ["field.csv", "solve_report.json"]


def test_main_exit_codes(tmp_path, capsys):
    ini = write_ini(tmp_path, BASE_INI.format(out=tmp_path / "m0"))
    assert main(["solve", ini]) == 0

    bad = write_ini(tmp_path, BASE_INI.format(out=tmp_path / "m2").replace(
        "lambda_plus = 2.0", "lambda_plus = 0.0"), "bad.ini")
    assert main(["solve", bad]) == 2
    assert "config error" in capsys.readouterr().err.lower()

    # sweep verb demands a [sweep] section
    assert main(["sweep", ini]) == 2


SWEEP_INI = BASE_INI.replace("n = 65", "n = 129") + """
[sweep]
family = constant
amplitudes = 0.1, 0.05
classify_budget = 4
"""

POLY_SWEEP_INI = """
[domain]
x_min = -1.0
x_max = 1.0
y_min = -1.0
y_max = 1.0
n = 129

[problem]
lambda_plus = 2.0
lambda_minus = 2.0

[boundary]
kind = polynomial
cxx = 0.25
cyy = 0.25

[sweep]
family = constant
amplitudes = 0.1, 0.05
classify_budget = 2

[output]
dir = {out}
"""


def test_stability_sweep_end_to_end(tmp_path):
    cfg = load_config(write_ini(tmp_path, SWEEP_INI.format(out=tmp_path / "sw")))
    report = stability_sweep(cfg)
    assert len(report.rows) == 2
    deltas = [row.delta for row in report.rows]
    assert deltas == [0.1, 0.05]
    for row in report.rows:
        assert row.comparison_holds
        assert row.sup_interior_diff <= row.delta + 1e-8
        assert row.sup_boundary_diff == pytest.approx(row.delta, rel=1e-6)
    assert report.hausdorff_monotone
    assert set(report.reference_labels) == {"branch"}


def test_sweep_aborts_on_one_phase_reference(tmp_path, capsys):
    ini = write_ini(tmp_path, POLY_SWEEP_INI.format(out=tmp_path / "ps"))
    with pytest.raises(SweepHypothesisError):
        stability_sweep(load_config(ini))
    assert main(["sweep", ini]) == 1
    assert "one_phase_singular" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# Selftest
# ---------------------------------------------------------------------------


def test_selftest_passes(capsys):
    assert selftest() == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("ok - ") >= 5
