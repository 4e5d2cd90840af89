import numpy as np
import pytest

from swapbell.bellalg import epsilon_state, psi_minus_pair
from swapbell.predictions import (
    CIRELSON_BOUND,
    NoisyEnsemble,
    RunConfig,
    estimate_m,
    expectation_m,
    sample_events,
    spectral_check_m,
    visibility_threshold,
    white_noise_ensemble,
    write_records_csv,
)
from swapbell.states import StateVector


def test_expectation_m_on_eps_states():
    assert expectation_m(epsilon_state(+1)) == pytest.approx(4.0, abs=1e-12)
    assert expectation_m(epsilon_state(-1)) == pytest.approx(4.0, abs=1e-12)
    assert expectation_m(psi_minus_pair()) == pytest.approx(4.0, abs=1e-12)


def test_expectation_m_maximally_mixed():
    ens = white_noise_ensemble(epsilon_state(+1), 0.0)
    assert expectation_m(ens) == pytest.approx(0.0, abs=1e-12)


def test_expectation_affine_in_visibility():
    target = epsilon_state(+1)
    for v in (0.0, 0.25, 0.5, 0.75, 1.0):
        val = expectation_m(white_noise_ensemble(target, v))
        assert abs(val - 4.0 * v) < 1e-12


def test_ensemble_weights_validated():
    with pytest.raises(ValueError):
        NoisyEnsemble(((0.7, epsilon_state(+1)),))
    with pytest.raises(ValueError):
        white_noise_ensemble(epsilon_state(+1), 1.5)


def test_spectral_check():
    report = spectral_check_m()
    assert report["ok"]
    assert report["max_eigenvalue"] == pytest.approx(4.0, abs=1e-10)
    assert report["eps_plus_in_top_eigenspace"] == pytest.approx(1.0, abs=1e-10)
    assert report["cirelson_bound"] == pytest.approx(CIRELSON_BOUND)
    assert report["lhv_bound"] < report["cirelson_bound"] < report["quantum_max"]


def test_visibility_threshold():
    assert visibility_threshold(epsilon_state(+1)) == pytest.approx(0.5, abs=1e-9)
    assert visibility_threshold(epsilon_state(-1)) == pytest.approx(0.5, abs=1e-9)


def test_visibility_threshold_rejects_weak_target():
    basis = np.zeros(16, dtype=complex)
    basis[0] = 1.0
    with pytest.raises(ValueError):
        visibility_threshold(StateVector(basis, ("1", "2", "3", "4")))


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(shots=0)
    with pytest.raises(ValueError):
        RunConfig(eta23=1.2)


def test_sample_level_avn_rules():
    records = sample_events(RunConfig(shots=5000, seed=11))
    assert all(r.o23_first * r.o23_second == +1
               for r in records if r.setting23 == "A")
    assert all(r.o23_first * r.o23_second == -1
               for r in records if r.setting23 == "B")
    records = sample_events(RunConfig(shots=5000, seed=12), epsilon_state(-1))
    assert all(r.o23_first * r.o23_second == -1
               for r in records if r.setting23 == "A")
    assert all(r.o23_first * r.o23_second == +1
               for r in records if r.setting23 == "B")


def test_sampling_is_reproducible():
    a = sample_events(RunConfig(shots=200, seed=5))
    b = sample_events(RunConfig(shots=200, seed=5))
    assert a == b


def test_estimate_ideal():
    records = sample_events(RunConfig(shots=20_000, seed=42))
    est = estimate_m(records)
    assert est["estimate"] == pytest.approx(4.0)
    assert est["stderr"] == pytest.approx(0.0)


def test_estimate_invariant_under_middle_station_loss():
    # fixed seed: efficiency changes never shift the outcome draws, so
    # losses at the middle station only shrink the post-selected sample
    estimates = []
    for eta23 in (1.0, 0.7, 0.3):
        records = sample_events(RunConfig(shots=20_000, seed=42, eta23=eta23))
        est = estimate_m(records)
        estimates.append(est)
        tol = max(5.0 * est["stderr"], 1e-12)
        assert abs(est["estimate"] - 4.0) <= tol
    assert estimates[0]["n_postselected"] > estimates[1]["n_postselected"] > estimates[2]["n_postselected"]


def test_loss_subsample_settings_unbiased():
    # click flags are independent of settings and outcomes: the surviving
    # trials' setting histogram passes a chi-square test at 8 cells
    records = sample_events(RunConfig(shots=40_000, seed=9, eta23=0.3))
    kept = [r for r in records if r.click23]
    counts = {}
    for r in kept:
        key = (r.setting1, r.setting23, r.setting4)
        counts[key] = counts.get(key, 0) + 1
    n = len(kept)
    chi2 = sum((c - n / 8) ** 2 / (n / 8) for c in counts.values())
    assert len(counts) == 8
    assert chi2 < 24.3  # chi-square_{7, 0.001}


def test_estimate_noisy_mixture():
    ens = white_noise_ensemble(epsilon_state(+1), 0.5)
    records = sample_events(RunConfig(shots=50_000, seed=42), ens)
    est = estimate_m(records)
    assert abs(est["estimate"] - 2.0) <= 3.0 * est["stderr"]


def test_site_marginals_unbiased():
    records = sample_events(RunConfig(shots=50_000, seed=3))
    for setting_attr, o_attr in (("setting1", "o1"), ("setting4", "o4")):
        for setting in ("z", "x"):
            vals = [getattr(r, o_attr) for r in records
                    if getattr(r, setting_attr) == setting]
            mean = sum(vals) / len(vals)
            stderr = 1.0 / np.sqrt(len(vals))
            assert abs(mean) < 5 * stderr


def test_estimate_requires_trials_per_term():
    records = sample_events(RunConfig(shots=100, seed=1, eta23=0.0))
    with pytest.raises(ValueError):
        estimate_m(records)


def test_csv_round_trip(tmp_path):
    import csv
    records = sample_events(RunConfig(shots=50, seed=2))
    path = tmp_path / "trials.csv"
    write_records_csv(records, path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 50
    assert rows[0].keys() == {
        "trial", "setting1", "setting23", "setting4",
        "o1", "o23_first", "o23_second", "o4",
        "click1", "click23", "click4",
    }
    assert int(rows[7]["trial"]) == 7
