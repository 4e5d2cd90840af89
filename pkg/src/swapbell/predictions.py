"""Quantum-side numbers and the seeded event-ready Monte Carlo.

The correlation operator under test is the four-term sum

    M = z1.z2z3.z4 + x1.x2x3.x4 + z1.z2x3.x4 + x1.x2z3.z4

whose deterministic local bound is 2 (under the apparatus-product
identity) while its quantum expectation on either eps state is 4.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, asdict

import numpy as np

from .bellalg import SWAP_CORRELATIONS, epsilon_state
from .states import ObservableSpec, StateVector, expectation, realize

M_TERMS = {
    "z1.z2z3.z4": SWAP_CORRELATIONS[0],
    "x1.x2x3.x4": SWAP_CORRELATIONS[1],
    "z1.z2x3.x4": SWAP_CORRELATIONS[2],
    "x1.x2z3.z4": SWAP_CORRELATIONS[3],
}

LHV_BOUND = 2.0
CIRELSON_BOUND = 2.0 * np.sqrt(2.0)
QUANTUM_MAX = 4.0

FOUR_LABELS = ("1", "2", "3", "4")

# joint measurement at the middle station: apparatus A measures the
# (z2z3, x2x3) pair, apparatus B the (z2x3, x2z3) pair
APPARATUS = {
    "A": (ObservableSpec({"2": "Z", "3": "Z"}), ObservableSpec({"2": "X", "3": "X"})),
    "B": (ObservableSpec({"2": "Z", "3": "X"}), ObservableSpec({"2": "X", "3": "Z"})),
}

SITE_OBS = {
    ("1", "z"): ObservableSpec({"1": "Z"}),
    ("1", "x"): ObservableSpec({"1": "X"}),
    ("4", "z"): ObservableSpec({"4": "Z"}),
    ("4", "x"): ObservableSpec({"4": "X"}),
}


@dataclass(frozen=True)
class NoisyEnsemble:
    """Weighted ensemble of pure states; weights sum to 1."""

    components: tuple  # of (weight, StateVector)

    def __post_init__(self):
        total = sum(w for w, _ in self.components)
        if any(w < 0 for w, _ in self.components):
            raise ValueError("weights must be nonnegative")
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")


def white_noise_ensemble(target: StateVector, visibility: float) -> NoisyEnsemble:
    """visibility * target + (1 - visibility) * white noise.

    The white-noise part is the uniform ensemble over the 16 computational
    basis states, which reproduces the maximally mixed state for every
    Pauli-string expectation.
    """
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility {visibility} out of [0, 1]")
    dim = target.amplitudes.shape[0]
    comps = [(visibility, target)]
    for i in range(dim):
        amps = np.zeros(dim, dtype=complex)
        amps[i] = 1.0
        comps.append(((1.0 - visibility) / dim, StateVector(amps, target.labels)))
    return NoisyEnsemble(tuple(comps))


def realize_m(labels: tuple[str, ...] = FOUR_LABELS) -> np.ndarray:
    total = np.zeros((2 ** len(labels),) * 2, dtype=complex)
    for obs in M_TERMS.values():
        total += realize(obs, labels).entries
    return total


def expectation_m(state_or_ensemble) -> float:
    """<M> for a pure state or a weighted pure ensemble."""
    if isinstance(state_or_ensemble, NoisyEnsemble):
        return sum(
            w * expectation_m(s) for w, s in state_or_ensemble.components
        )
    s = state_or_ensemble
    op = realize_m(s.labels)
    return float(np.real(np.vdot(s.amplitudes, op @ s.amplitudes)))


def spectral_check_m() -> dict:
    """Eigendecomposition of the realized 16x16 operator.

    Confirms the spectral maximum 4 and that eps(+1) lies in the top
    eigenspace; reports the deterministic local bound 2 and the standard
    two-setting quantum ceiling 2*sqrt(2) for comparison.
    """
    m = realize_m()
    evals, evecs = np.linalg.eigh(m)
    top = float(evals[-1])
    mask = evals > top - 1e-8
    p_top = evecs[:, mask] @ evecs[:, mask].conj().T
    eps_plus = epsilon_state(+1).amplitudes
    overlap = float(np.real(np.vdot(eps_plus, p_top @ eps_plus)))
    return {
        "max_eigenvalue": top,
        "top_eigenspace_dim": int(mask.sum()),
        "eps_plus_in_top_eigenspace": overlap,
        "lhv_bound": LHV_BOUND,
        "cirelson_bound": float(CIRELSON_BOUND),
        "quantum_max": QUANTUM_MAX,
        "ordering_ok": LHV_BOUND < CIRELSON_BOUND < QUANTUM_MAX,
        "ok": abs(top - QUANTUM_MAX) < 1e-10 and abs(overlap - 1.0) < 1e-10,
    }


def visibility_threshold(target: StateVector, tol: float = 1e-9) -> float:
    """Smallest visibility whose white-noise mixture still beats the bound 2.

    Found by bisection; since <M> is affine in the visibility (= 4V for
    the eps targets) this lands on 0.5.
    """
    if expectation_m(target) <= LHV_BOUND:
        raise ValueError("target does not violate the bound even at full visibility")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if expectation_m(white_noise_ensemble(target, mid)) > LHV_BOUND:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# --- event-ready Monte Carlo ------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    shots: int = 100_000
    eta1: float = 1.0
    eta23: float = 1.0
    eta4: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        for eta in (self.eta1, self.eta23, self.eta4):
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"efficiency {eta} out of [0, 1]")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    setting1: str       # "z" | "x"
    setting23: str      # "A" | "B"
    setting4: str       # "z" | "x"
    o1: int
    o23_first: int
    o23_second: int
    o4: int
    click1: bool
    click23: bool
    click4: bool


CELLS = [
    (s1, app, s4) for s1 in ("z", "x") for app in ("A", "B") for s4 in ("z", "x")
]

_OUTCOME_PATTERNS = [
    tuple(1 - 2 * ((i >> b) & 1) for b in (3, 2, 1, 0)) for i in range(16)
]


def _joint_distribution(state: StateVector, cell) -> np.ndarray:
    """Born probabilities of the 16 joint (o1, o23a, o23b, o4) outcomes."""
    s1, app, s4 = cell
    obs = [SITE_OBS[("1", s1)], APPARATUS[app][0], APPARATUS[app][1], SITE_OBS[("4", s4)]]
    mats = [realize(o, state.labels).entries for o in obs]
    eye = np.eye(state.amplitudes.shape[0], dtype=complex)
    probs = np.empty(16)
    for idx, signs in enumerate(_OUTCOME_PATTERNS):
        vec = state.amplitudes
        for sign, mat in zip(signs, mats):
            vec = 0.5 * (vec + sign * (mat @ vec))
        probs[idx] = np.real(np.vdot(vec, vec))
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # pure function of (seed, trial): parallel shot splitting stays
    # bit-reproducible and efficiency changes never shift outcome draws
    return np.random.Generator(np.random.Philox(key=[seed, trial]))


def sample_events(cfg: RunConfig, source=None) -> list[TrialRecord]:
    """Simulate seeded event-ready trials.

    Each trial draws uniform settings, measures the shared state
    projectively (sites are independent given the state; no cross-site
    communication), and registers clicks independently per site.
    `source` may be a StateVector or a NoisyEnsemble; defaults to eps(+1).
    """
    if source is None:
        source = epsilon_state(+1)
    if isinstance(source, NoisyEnsemble):
        weights = np.array([w for w, _ in source.components])
        comps = [s for _, s in source.components]
    else:
        weights = np.array([1.0])
        comps = [source]
    cum_weights = np.cumsum(weights)
    # per-component, per-cell cumulative outcome distributions
    cum_probs = {
        (ci, cell): np.cumsum(_joint_distribution(comp, cell))
        for ci, comp in enumerate(comps)
        for cell in CELLS
    }
    records = []
    for trial in range(cfg.shots):
        u = _trial_rng(cfg.seed, trial).random(8)
        ci = int(np.searchsorted(cum_weights, u[0] * cum_weights[-1]))
        ci = min(ci, len(comps) - 1)
        s1 = "z" if u[1] < 0.5 else "x"
        app = "A" if u[2] < 0.5 else "B"
        s4 = "z" if u[3] < 0.5 else "x"
        cum = cum_probs[(ci, (s1, app, s4))]
        idx = int(np.searchsorted(cum, u[4] * cum[-1]))
        o1, o23a, o23b, o4 = _OUTCOME_PATTERNS[min(idx, 15)]
        records.append(TrialRecord(
            trial=trial, setting1=s1, setting23=app, setting4=s4,
            o1=o1, o23_first=o23a, o23_second=o23b, o4=o4,
            click1=bool(u[5] < cfg.eta1),
            click23=bool(u[6] < cfg.eta23),
            click4=bool(u[7] < cfg.eta4),
        ))
    return records


# which (setting1, apparatus, setting4) cell estimates each M term, and
# whether the first or second apparatus outcome enters the product
TERM_CELLS = {
    "z1.z2z3.z4": (("z", "A", "z"), "first"),
    "x1.x2x3.x4": (("x", "A", "x"), "second"),
    "z1.z2x3.x4": (("z", "B", "x"), "first"),
    "x1.x2z3.z4": (("x", "B", "z"), "second"),
}


def estimate_m(records: list[TrialRecord], postselect: bool = True) -> dict:
    """Estimate <M> from trial records, term by term.

    With `postselect`, trials missing any click are discarded (the
    event-ready rule); losses at the middle station only shrink the
    sample, they cannot bias the estimate.
    """
    if postselect:
        records = [r for r in records if r.click1 and r.click23 and r.click4]
    per_term = {}
    estimate = 0.0
    variance = 0.0
    for term, (cell, which) in TERM_CELLS.items():
        vals = [
            r.o1 * (r.o23_first if which == "first" else r.o23_second) * r.o4
            for r in records
            if (r.setting1, r.setting23, r.setting4) == cell
        ]
        if not vals:
            raise ValueError(f"no post-selected trials for term {term}")
        n = len(vals)
        mean = sum(vals) / n
        var = max(0.0, (1.0 - mean * mean)) / n
        per_term[term] = {"estimate": mean, "stderr": float(np.sqrt(var)), "n": n}
        estimate += mean
        variance += var
    return {
        "estimate": estimate,
        "stderr": float(np.sqrt(variance)),
        "per_term": per_term,
        "n_postselected": len(records),
    }


CSV_COLUMNS = [
    "trial", "setting1", "setting23", "setting4",
    "o1", "o23_first", "o23_second", "o4",
    "click1", "click23", "click4",
]


def write_records_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in records:
            row = asdict(r)
            row["click1"] = int(r.click1)
            row["click23"] = int(r.click23)
            row["click4"] = int(r.click4)
            writer.writerow(row)
