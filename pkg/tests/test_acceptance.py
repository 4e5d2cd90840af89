"""Acceptance suite: one test per criterion, one printed line each."""

import time

import numpy as np
import pytest

from swapbell.bellalg import algebra_manifest, epsilon_state
from swapbell.cli import main
from swapbell.lhv import avn_certificate, lhv_bound_m
from swapbell.optics import search_layout
from swapbell.predictions import (
    RunConfig,
    estimate_m,
    expectation_m,
    sample_events,
    spectral_check_m,
    visibility_threshold,
    white_noise_ensemble,
)


def report(name, ok):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")
    assert ok


def test_criterion_1_algebra_suite():
    t0 = time.perf_counter()
    manifest = algebra_manifest()
    elapsed = time.perf_counter() - t0
    residuals_ok = all(c["residual"] < 1e-10 for c in manifest["checks"])
    report("1 algebra-suite", manifest["all_ok"] and residuals_ok and elapsed < 1.0)


def test_criterion_2_avn_certificate():
    t0 = time.perf_counter()
    cert = avn_certificate()
    elapsed = time.perf_counter() - t0
    report("2 avn-certificate", cert["ok"] and elapsed < 1.0)


def test_criterion_3_bounds():
    constrained = lhv_bound_m(constrained=True)
    unconstrained = lhv_bound_m(constrained=False)
    spectral = spectral_check_m()
    ok = (
        constrained["max_value"] == 2
        and unconstrained["max_value"] == 4
        and abs(spectral["max_eigenvalue"] - 4.0) < 1e-10
        and abs(spectral["eps_plus_in_top_eigenspace"] - 1.0) < 1e-10
        and abs(spectral["cirelson_bound"] - 2.0 * np.sqrt(2.0)) < 1e-12
    )
    report("3 bounds", ok)


def test_criterion_4_visibility():
    target = epsilon_state(+1)
    threshold = visibility_threshold(target)
    affine = all(
        abs(expectation_m(white_noise_ensemble(target, v)) - 4.0 * v) < 1e-12
        for v in (0.0, 0.25, 0.5, 0.75, 1.0)
    )
    report("4 visibility", abs(threshold - 0.5) < 1e-9 and affine)


def test_criterion_5_monte_carlo():
    t0 = time.perf_counter()
    records = sample_events(RunConfig(shots=100_000, seed=42))
    est = estimate_m(records)
    ideal_ok = abs(est["estimate"] - 4.0) <= max(3.0 * est["stderr"], 1e-12)
    avn_ok = all(
        r.o23_first * r.o23_second == (+1 if r.setting23 == "A" else -1)
        for r in records
    )
    lossy = sample_events(RunConfig(shots=100_000, seed=42, eta23=0.3))
    est_lossy = estimate_m(lossy)
    lossy_ok = abs(est_lossy["estimate"] - 4.0) <= max(5.0 * est_lossy["stderr"], 1e-12)
    elapsed = time.perf_counter() - t0
    report("5 monte-carlo", ideal_ok and avn_ok and lossy_ok and elapsed < 30.0)


def test_criterion_6_optics():
    t0 = time.perf_counter()
    passing = search_layout("i")
    elapsed = time.perf_counter() - t0
    ok = len(passing) >= 1 and elapsed < 300.0
    for rep in passing:
        ok = ok and rep["p_coincidence_eps_minus"] < 1e-12
        ok = ok and abs(rep["p_coincidence_eps_plus"] - 1.0) < 1e-10
        ok = ok and abs(rep["p_coincidence_product_input"] - 0.5) < 1e-10
        ok = ok and rep["fidelity"] >= 1.0 - 1e-10
    report("6 optics", ok)


def test_criterion_7_reproducibility(tmp_path):
    args = ["all", "--shots", "2000", "--seed", "42"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b")]) == 0
    identical = True
    for path_a in sorted((tmp_path / "a").iterdir()):
        path_b = tmp_path / "b" / path_a.name
        identical = identical and path_a.read_bytes() == path_b.read_bytes()
    report("7 reproducibility", identical)
