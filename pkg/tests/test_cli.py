"""End-to-end checks of the batch interface: exit codes, report layout,
and byte-identical reruns."""

import json
import os
import subprocess
import sys

import pytest

from warpcurv.cli import ENV_OUT, main


def _write_config(path, cfg):
    with open(path, "w") as fh:
        json.dump(cfg, fh)
    return str(path)


def _read_json(out_dir, name):
    with open(os.path.join(str(out_dir), name)) as fh:
        return json.load(fh)


def _tree_bytes(root):
    found = {}
    for dirpath, _, filenames in os.walk(str(root)):
        for fn in filenames:
            full = os.path.join(dirpath, fn)
            with open(full, "rb") as fh:
                found[os.path.relpath(full, str(root))] = fh.read()
    return found


SLICE_VERIFY = {
    "ambient": {"profile": "cosh", "chart": "flat-torus", "n": 2},
    "immersion": {"family": "slice", "t": 0.7, "resolution": 24},
    "tolerance": 1e-9,
    "operations": [
        {"op": "structure"},
        {"op": "height-sigma", "k": 1},
        {"op": "div-newton", "k": 1},
        {"op": "theta-hat", "k": 1},
        {"op": "calligraphic", "k": 2},
        {"op": "laplacian-cross-check"},
    ],
}


def test_verify_slice_exits_clean(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json", SLICE_VERIFY)
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    summary = _read_json(out, "verify-summary.json")
    assert summary["exit_code"] == 0
    assert summary["failed"] == []
    assert not summary["not_applicable_only"]
    assert [o["status"] for o in summary["operations"]] == ["pass"] * 6
    # each operation also gets its own report file
    assert (out / "verify-00-structure.json").exists()
    assert (out / "verify-05-laplacian-cross-check.json").exists()


def test_verify_detects_violation(tmp_path):
    # a random graph cannot satisfy the structure identities to 1e-15
    cfg = _write_config(tmp_path / "cfg.json", {
        "ambient": {"profile": "exp", "chart": "flat-torus", "n": 2},
        "immersion": {"family": "random", "resolution": 24,
                      "amplitude": 0.2},
        "seed": 5,
        "operations": [{"op": "structure", "tol": 1e-15}],
    })
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 1
    summary = _read_json(out, "verify-summary.json")
    assert summary["failed"] == ["structure"]
    assert summary["exit_code"] == 1


def test_not_applicable_is_not_a_failure(tmp_path):
    # at the cosh waist the height speed vanishes, so the positivity-
    # normalized operator suite declines instead of failing
    cfg = _write_config(tmp_path / "cfg.json", {
        "ambient": {"profile": "cosh", "chart": "flat-torus", "n": 2},
        "immersion": {"family": "slice", "t": 0.0, "resolution": 16},
        "operations": [{"op": "frak-phi", "k": 1}],
    })
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    summary = _read_json(out, "verify-summary.json")
    assert summary["not_applicable_only"]
    assert summary["operations"][0]["status"] == "not-applicable"
    entry = _read_json(out, "verify-00-frak-phi.json")
    assert "reason" in entry


def test_config_errors_exit_two(tmp_path, capsys):
    out = str(tmp_path / "out")

    rc = main(["verify", "--config", str(tmp_path / "missing.json"),
               "--out", out])
    assert rc == 2
    assert "not found" in capsys.readouterr().err

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--config", str(bad), "--out", out]) == 2
    assert "valid JSON" in capsys.readouterr().err

    cfg = _write_config(tmp_path / "p.json", {
        "ambient": {"profile": "warp-factor-9"},
        "operations": [{"op": "structure"}]})
    assert main(["verify", "--config", cfg, "--out", out]) == 2
    assert "registry" in capsys.readouterr().err

    cfg = _write_config(tmp_path / "o.json", {
        "ambient": {"profile": "exp"},
        "immersion": {"family": "slice", "resolution": 12},
        "operations": [{"op": "does-not-exist"}]})
    assert main(["verify", "--config", cfg, "--out", out]) == 2
    assert "unknown verify operation" in capsys.readouterr().err

    cfg = _write_config(tmp_path / "empty.json", {
        "ambient": {"profile": "exp"}, "operations": []})
    assert main(["verify", "--config", cfg, "--out", out]) == 2
    assert "non-empty" in capsys.readouterr().err


def test_out_dir_from_environment(tmp_path, monkeypatch):
    cfg = _write_config(tmp_path / "cfg.json", {
        "growth": "one", "T": 2.0})
    env_dir = tmp_path / "from-env"
    monkeypatch.setenv(ENV_OUT, str(env_dir))
    assert main(["comparison", "--config", cfg]) == 0
    assert (env_dir / "comparison-summary.json").exists()


def test_scenario_statuses_and_hypothesis_handling(tmp_path):
    # a perturbed graph breaks the constancy hypothesis: the run reports
    # hypothesis-violated but still exits 0 (nothing was falsified)
    cfg = _write_config(tmp_path / "cfg.json", {
        "ambient": {"profile": "cosh", "chart": "flat-torus", "n": 2},
        "immersion": {"family": "random", "t_center": 0.7,
                      "amplitude": 0.1, "resolution": 20},
        "seed": 11,
        "operations": [
            {"op": "theorem-audit", "id": "compact-constant-h2"},
            {"op": "parabolicity", "model": "flat", "H": 1.0, "k": 1},
        ],
    })
    out = tmp_path / "out"
    assert main(["scenario", "--config", cfg, "--out", str(out)]) == 0
    summary = _read_json(out, "scenario-summary.json")
    assert summary["operations"][0]["status"] == "hypothesis-violated"
    assert summary["operations"][1]["status"] == "pass"
    assert summary["failed"] == []
    audit = _read_json(out, "scenario-00-theorem-audit.json")
    assert audit["report"]["verdict"] == "hypothesis-violated"
    table = (out / "scenario-01-parabolicity.tsv").read_text().splitlines()
    assert table[0] == "t\tintegrand"
    assert len(table) > 10


def test_scenario_slice_audit_passes(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json", {
        "ambient": {"profile": "cosh", "chart": "flat-torus", "n": 2},
        "immersion": {"family": "slice", "t": 0.7, "resolution": 20},
        "operations": [
            {"op": "theorem-audit", "id": "compact-constant-h2"},
            {"op": "curvature-estimate", "order": 2},
            {"op": "elliptic-signs"},
        ],
    })
    out = tmp_path / "out"
    assert main(["scenario", "--config", cfg, "--out", str(out)]) == 0
    summary = _read_json(out, "scenario-summary.json")
    assert [o["status"] for o in summary["operations"]] == ["pass"] * 3


def test_probe_reports_and_table(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json", {
        "model": "hyperbolic",
        "height": {"family": "tanh"},
        "jmax": 12,
    })
    out = tmp_path / "out"
    assert main(["probe", "--config", cfg, "--out", str(out)]) == 0
    entry = _read_json(out, "probe-00-omori-yau.json")
    assert entry["status"] == "pass"
    assert not entry["boundary_flag"]
    assert len(entry["records"]) == 12
    lines = (out / "probe-00-omori-yau.tsv").read_text().splitlines()
    assert lines[0] == "j\tradius\tgap\tgrad_norm\tLu"
    assert len(lines) == 13


def test_probe_boundary_flag_goes_not_applicable(tmp_path):
    # heights that keep growing push every maximizer to the boundary
    cfg = _write_config(tmp_path / "cfg.json", {
        "model": "flat",
        "height": {"family": "negative-square"},
        "jmax": 6,
    })
    out = tmp_path / "out"
    rc = main(["probe", "--config", cfg, "--out", str(out)])
    entry = _read_json(out, "probe-00-omori-yau.json")
    if entry["status"] == "not-applicable":
        assert rc == 0
        assert entry["boundary_flag"]
    else:
        # -r^2 is maximized at the origin; accept an interior certificate
        assert rc == 0 and entry["status"] == "pass"


def test_comparison_with_growing_bound_passes(tmp_path):
    # regression: the solution-side Riccati drift for non-constant growth
    # must not be gated as a violation
    cfg = _write_config(tmp_path / "cfg.json", {
        "growth": "quadratic", "T": 6.0})
    out = tmp_path / "out"
    assert main(["comparison", "--config", cfg, "--out", str(out)]) == 0
    entry = _read_json(out, "comparison-01-solution.json")
    assert entry["gates"]["riccati_nonnegative"]
    assert entry["gates"]["envelope_identity_nonneg"]
    assert entry["gates"]["sturm_holds"]
    assert entry["report"]["riccati_min"] < -0.5  # the drift is real


def test_comparison_with_model_section(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json", {
        "growth": "one", "T": 4.0, "model": "hyperbolic"})
    out = tmp_path / "out"
    assert main(["comparison", "--config", cfg, "--out", str(out)]) == 0
    entry = _read_json(out, "comparison-02-hessian.json")
    assert entry["status"] == "pass"
    lines = (out / "comparison-01-solution.tsv").read_text().splitlines()
    assert lines[0] == "t\tphi\tdphi\tpsi\tdpsi\tenvelope"


@pytest.mark.parametrize("argv_cfg", [
    ("verify", SLICE_VERIFY),
    ("verify", {
        "ambient": {"profile": "exp", "chart": "flat-torus", "n": 2},
        "immersion": {"family": "random", "resolution": 20,
                      "amplitude": 0.15},
        "seed": 7,
        "operations": [{"op": "structure", "tol": 1e-3},
                       {"op": "gamma-probe", "tol": 1e-2}],
    }),
    ("probe", {"model": "hyperbolic", "height": {"family": "tanh"},
               "jmax": 8}),
    ("comparison", {"growth": "quadratic", "T": 4.0,
                    "model": "hyperbolic"}),
])
def test_reruns_are_byte_identical(tmp_path, argv_cfg):
    sub, config = argv_cfg
    cfg = _write_config(tmp_path / "cfg.json", config)
    first, second = tmp_path / "a", tmp_path / "b"
    rc1 = main([sub, "--config", cfg, "--out", str(first)])
    rc2 = main([sub, "--config", cfg, "--out", str(second)])
    assert rc1 == rc2
    ta, tb = _tree_bytes(first), _tree_bytes(second)
    assert sorted(ta) == sorted(tb)
    for name in ta:
        assert ta[name] == tb[name], f"{name} differs between reruns"


def test_seed_flag_overrides_config(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json", {
        "ambient": {"profile": "exp", "chart": "flat-torus", "n": 2},
        "immersion": {"family": "random", "resolution": 16},
        "seed": 3,
        "operations": [{"op": "structure", "tol": 1.0}],
    })
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    main(["verify", "--config", cfg, "--out", str(out_a), "--seed", "9"])
    main(["verify", "--config", cfg, "--out", str(out_b)])
    assert _read_json(out_a, "verify-summary.json")["seed"] == 9
    assert _read_json(out_b, "verify-summary.json")["seed"] == 3
    ra = _read_json(out_a, "verify-00-structure.json")["residuals"]
    rb = _read_json(out_b, "verify-00-structure.json")["residuals"]
    assert ra != rb  # different seeds, different random graphs


def test_console_script_entry_point(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json", {"growth": "one", "T": 2.0})
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "warpcurv.cli", "comparison",
         "--config", cfg, "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "comparison-summary.json").exists()
