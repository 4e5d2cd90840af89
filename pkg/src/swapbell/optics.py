"""Two-photon dual-rail simulation of the coincidence selector.

Photons 2 and 3 (entangled with the external qubits 1 and 4) travel on
two spatial rails through wave plates and a single polarizing beam
splitter; coincidence detection (one photon per rail at the end) keeps
exactly the eps(+1) component of the swapping input.

Mode bookkeeping: the labels in2/out_c name rail A before/after the PBS
and in3/out_d name rail B, so there are four optical modes in play
(2 rails x 2 polarizations).  The two photons are indistinguishable
bosons; states live in the 10-dimensional symmetric two-photon sector,
tensored with the external qubit pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from .bellalg import epsilon_state, psi_minus_pair
from .states import StateVector

RAIL_A, RAIL_B = 0, 1
SPATIAL_ALIASES = {"in2": RAIL_A, "out_c": RAIL_A, "in3": RAIL_B, "out_d": RAIL_B}

# single-photon modes: (rail, polarization), H = 0, V = 1
N_MODES = 4


def _mode(rail: int, pol: int) -> int:
    return 2 * rail + pol


# symmetric two-photon basis: ordered pairs (j, k) with j <= k
SYM_PAIRS = [(j, k) for j in range(N_MODES) for k in range(j, N_MODES)]
PAIR_INDEX = {pair: i for i, pair in enumerate(SYM_PAIRS)}
N_PAIRS = len(SYM_PAIRS)

# one photon per rail, any polarizations: the coincidence patterns
COINCIDENCE_PAIRS = [
    PAIR_INDEX[(_mode(RAIL_A, pa), _mode(RAIL_B, pb))]
    for pa in (0, 1) for pb in (0, 1)
]

SQ2 = np.sqrt(2.0)

# QWP at 45 deg: R -> H, L -> V (canonical phase 0 on both images)
QWP45_U = np.array([[1.0, -1.0j], [1.0, 1.0j]], dtype=complex) / SQ2
# HWP: R <-> L, canonical choice H -> H, V -> -V
HWP_U = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

PBS_PHASES = {"+1": 1.0 + 0.0j, "i": 1.0j, "-i": -1.0j}


class LayoutError(ValueError):
    """Malformed or over-inventory element layout."""


@dataclass(frozen=True)
class Element:
    kind: str                  # "QWP45" | "HWP" | "PBS"
    targets: tuple[str, ...]   # one spatial label for plates, two for the PBS

    def __post_init__(self):
        if self.kind not in ("QWP45", "HWP", "PBS"):
            raise LayoutError(f"unknown element kind {self.kind!r}")
        want = 2 if self.kind == "PBS" else 1
        if len(self.targets) != want:
            raise LayoutError(f"{self.kind} takes {want} target(s), got {self.targets}")
        for t in self.targets:
            if t not in SPATIAL_ALIASES:
                raise LayoutError(f"unknown spatial mode {t!r}")
        if self.kind == "PBS":
            rails = {SPATIAL_ALIASES[t] for t in self.targets}
            if rails != {RAIL_A, RAIL_B}:
                raise LayoutError("PBS must target one mode on each rail")


@dataclass(frozen=True)
class Layout:
    elements: tuple[Element, ...]
    pbs_phase: str = "i"

    def __post_init__(self):
        if self.pbs_phase not in PBS_PHASES:
            raise LayoutError(f"pbs_phase must be one of {sorted(PBS_PHASES)}")
        counts = {"QWP45": 0, "HWP": 0, "PBS": 0}
        for e in self.elements:
            counts[e.kind] += 1
        if counts["QWP45"] > 4 or counts["HWP"] > 2 or counts["PBS"] > 1:
            raise LayoutError(f"inventory exceeded: {counts}")


@dataclass(frozen=True)
class HybridState:
    """External qubits (1, 4) tensored with the symmetric two-photon sector.

    `amplitudes` has shape (2, 2, 10) indexed by (qubit1, qubit4, pair);
    a doubly occupied mode carries the bosonic sqrt(2) normalization so
    that the plain Euclidean norm is preserved by every linear-optics
    unitary.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (2, 2, N_PAIRS):
            raise ValueError(f"expected shape (2, 2, {N_PAIRS}), got {amps.shape}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _to_product(amps: np.ndarray) -> np.ndarray:
    """Symmetric-sector amplitudes -> first-quantized (2,2,4,4) tensor."""
    prod = np.zeros((2, 2, N_MODES, N_MODES), dtype=complex)
    for (j, k), idx in PAIR_INDEX.items():
        if j == k:
            prod[:, :, j, j] = amps[:, :, idx]
        else:
            prod[:, :, j, k] = amps[:, :, idx] / SQ2
            prod[:, :, k, j] = amps[:, :, idx] / SQ2
    return prod


def _from_product(prod: np.ndarray) -> np.ndarray:
    amps = np.zeros((2, 2, N_PAIRS), dtype=complex)
    for (j, k), idx in PAIR_INDEX.items():
        if j == k:
            amps[:, :, idx] = prod[:, :, j, j]
        else:
            amps[:, :, idx] = (prod[:, :, j, k] + prod[:, :, k, j]) / SQ2
    return amps


def _apply_mode_unitary(s: HybridState, u: np.ndarray) -> HybridState:
    prod = _to_product(s.amplitudes)
    prod = np.einsum("ja,kb,xyab->xyjk", u, u, prod)
    return HybridState(_from_product(prod))


def element_unitary(e: Element, pbs_phase: str = "i") -> np.ndarray:
    """The 4x4 single-photon mode unitary of one element."""
    u = np.eye(N_MODES, dtype=complex)
    if e.kind == "PBS":
        phase = PBS_PHASES[pbs_phase]
        u = np.zeros((N_MODES, N_MODES), dtype=complex)
        # H transmits (stays on its rail), V reflects across with a phase
        u[_mode(RAIL_A, 0), _mode(RAIL_A, 0)] = 1.0
        u[_mode(RAIL_B, 0), _mode(RAIL_B, 0)] = 1.0
        u[_mode(RAIL_B, 1), _mode(RAIL_A, 1)] = phase
        u[_mode(RAIL_A, 1), _mode(RAIL_B, 1)] = phase
        return u
    rail = SPATIAL_ALIASES[e.targets[0]]
    block = QWP45_U if e.kind == "QWP45" else HWP_U
    sl = slice(2 * rail, 2 * rail + 2)
    u[sl, sl] = block
    return u


def apply_element(s: HybridState, e: Element, pbs_phase: str = "i") -> HybridState:
    return _apply_mode_unitary(s, element_unitary(e, pbs_phase))


def embed(source: StateVector) -> HybridState:
    """Load a 4-qubit state: photon 2 onto rail A, photon 3 onto rail B."""
    if source.labels != ("1", "2", "3", "4"):
        raise ValueError(f"source must carry labels ('1','2','3','4'), got {source.labels}")
    amps = np.zeros((2, 2, N_PAIRS), dtype=complex)
    src = source.amplitudes.reshape(2, 2, 2, 2)
    for q1, p2, p3, q4 in iproduct(range(2), repeat=4):
        pair = (_mode(RAIL_A, p2), _mode(RAIL_B, p3))
        amps[q1, q4, PAIR_INDEX[pair]] += src[q1, p2, p3, q4]
    return HybridState(amps)


def run_layout(source: StateVector, layout: Layout) -> HybridState:
    s = embed(source)
    for e in layout.elements:
        s = apply_element(s, e, layout.pbs_phase)
    return s


def coincidence_project(s: HybridState) -> tuple[float, HybridState | None]:
    """Project onto one photon per rail (any polarizations).

    Returns (probability, renormalized conditional state); the
    conditional is None when the probability vanishes.
    """
    kept = np.zeros_like(s.amplitudes)
    kept[:, :, COINCIDENCE_PAIRS] = s.amplitudes[:, :, COINCIDENCE_PAIRS]
    prob = float(np.linalg.norm(kept) ** 2)
    if prob < 1e-300:
        return 0.0, None
    return prob, HybridState(kept / np.sqrt(prob))


def to_four_qubits(s: HybridState) -> StateVector:
    """Read a one-photon-per-rail state back into the 4-qubit picture.

    Rail A's polarization becomes qubit 2, rail B's becomes qubit 3.
    Requires all support on coincidence patterns.
    """
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    for pa in (0, 1):
        for pb in (0, 1):
            idx = PAIR_INDEX[(_mode(RAIL_A, pa), _mode(RAIL_B, pb))]
            out[:, pa, pb, :] = s.amplitudes[:, :, idx]
    res = float(np.linalg.norm(out)) - s.norm()
    if abs(res) > 1e-12:
        raise ValueError("state has support outside coincidence patterns")
    return StateVector(out.reshape(-1), ("1", "2", "3", "4"))


# --- fidelity up to a local polarization frame on the outputs ---------------

def frame_fidelity(candidate: StateVector, target: StateVector,
                   restarts: int = 4, iters: int = 200) -> tuple[float, np.ndarray, np.ndarray]:
    """max |<target| (I x W_a x W_b x I) |candidate>|^2 over 2x2 unitaries.

    Alternating SVD alignment of the two single-qubit frames; a few
    seeded random restarts guard against poor local optima.  Returns
    (fidelity, W_a, W_b) where W_a acts on qubit 2 and W_b on qubit 3.
    """
    c = candidate.amplitudes.reshape(2, 2, 2, 2)
    t = target.amplitudes.reshape(2, 2, 2, 2)
    # g[(a,b),(a',b')] = sum_{q1,q4} conj(t)[q1,a,b,q4] c[q1,a',b',q4]
    g = np.einsum("xabz,xcdz->abcd", t.conj(), c)
    rng = np.random.default_rng(20240915)
    best = (-1.0, np.eye(2, dtype=complex), np.eye(2, dtype=complex))
    for attempt in range(restarts):
        if attempt == 0:
            wb = np.eye(2, dtype=complex)
        else:
            z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            wb, _ = np.linalg.qr(z)
        wa = np.eye(2, dtype=complex)
        val = 0.0
        for _ in range(iters):
            # objective sum_{a,c} m_a[a,c] wa[a,c] is maximized by SVD alignment
            m_a = np.einsum("abcd,bd->ac", g, wb)
            u, sv, vh = np.linalg.svd(m_a.T)
            wa = (vh.conj().T @ u.conj().T)
            m_b = np.einsum("abcd,ac->bd", g, wa)
            u, sv, vh = np.linalg.svd(m_b.T)
            wb = (vh.conj().T @ u.conj().T)
            new_val = abs(np.einsum("abcd,ac,bd->", g, wa, wb))
            if abs(new_val - val) < 1e-15:
                val = new_val
                break
            val = new_val
        if val > best[0]:
            best = (val, wa, wb)
    fid = best[0] ** 2
    return float(fid), best[1], best[2]


def verify_selection(layout: Layout) -> dict:
    """PASS iff the layout keeps eps(+1), rejects eps(-1), and halves
    the swapping input, with the conditional state matching eps(+1) up
    to a recorded local polarization frame on the two outputs."""
    p_minus, _ = coincidence_project(run_layout(epsilon_state(-1), layout))
    p_plus, _ = coincidence_project(run_layout(epsilon_state(+1), layout))
    p_prod, conditional = coincidence_project(run_layout(psi_minus_pair(), layout))
    fidelity = 0.0
    frame = None
    if conditional is not None:
        try:
            cond4 = to_four_qubits(conditional)
        except ValueError:
            cond4 = None
        if cond4 is not None:
            fidelity, wa, wb = frame_fidelity(cond4, epsilon_state(+1))
            frame = {
                "out_c": [[_c2s(x) for x in row] for row in wa],
                "out_d": [[_c2s(x) for x in row] for row in wb],
            }
    ok = (
        p_minus < 1e-12
        and abs(p_plus - 1.0) < 1e-10
        and abs(p_prod - 0.5) < 1e-10
        and fidelity >= 1.0 - 1e-10
    )
    return {
        "layout": layout_lines(layout),
        "convention": layout.pbs_phase,
        "p_coincidence_eps_plus": p_plus,
        "p_coincidence_eps_minus": p_minus,
        "p_coincidence_product_input": p_prod,
        "fidelity": fidelity,
        "frame": frame,
        "pass": ok,
    }


def _c2s(x: complex) -> list[float]:
    return [float(np.real(x)), float(np.imag(x))]


# --- layout files and exhaustive search --------------------------------------

def layout_lines(layout: Layout) -> list[str]:
    lines = [" ".join([e.kind.lower(), *e.targets]) for e in layout.elements]
    return lines


def write_layout(layout: Layout, path) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(layout_lines(layout)) + "\n")


def parse_layout(text: str, pbs_phase: str = "i") -> Layout:
    elements = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].upper()
        elements.append(Element(kind, tuple(parts[1:])))
    return Layout(tuple(elements), pbs_phase)


def read_layout(path, pbs_phase: str = "i") -> Layout:
    with open(path) as fh:
        return parse_layout(fh.read(), pbs_phase)


# ordered plate stacks allowed in one slot (at most two plates)
_SLOT_OPTIONS = ["", "Q", "H", "QQ", "QH", "HQ", "HH"]
_SLOT_NAMES = ("in2", "in3", "out_c", "out_d")


def _stack_elements(stack: str, slot: str) -> list[Element]:
    kinds = {"Q": "QWP45", "H": "HWP"}
    return [Element(kinds[ch], (slot,)) for ch in stack]


def candidate_layouts(pbs_phase: str = "i"):
    """All plate placements within inventory, in a fixed enumeration order."""
    for stacks in iproduct(_SLOT_OPTIONS, repeat=4):
        combined = "".join(stacks)
        if combined.count("Q") > 4 or combined.count("H") > 2:
            continue
        elements = (
            _stack_elements(stacks[0], "in2")
            + _stack_elements(stacks[1], "in3")
            + [Element("PBS", ("in2", "in3"))]
            + _stack_elements(stacks[2], "out_c")
            + _stack_elements(stacks[3], "out_d")
        )
        yield Layout(tuple(elements), pbs_phase)


def search_layout(pbs_phase: str = "i", max_results: int | None = None) -> list[dict]:
    """Exhaustively verify every candidate; return the PASS reports."""
    passing = []
    for layout in candidate_layouts(pbs_phase):
        # cheap gates first; the frame fit only runs for survivors
        p_minus, _ = coincidence_project(run_layout(epsilon_state(-1), layout))
        if p_minus >= 1e-12:
            continue
        p_plus, _ = coincidence_project(run_layout(epsilon_state(+1), layout))
        if abs(p_plus - 1.0) >= 1e-10:
            continue
        report = verify_selection(layout)
        if report["pass"]:
            passing.append(report)
            if max_results is not None and len(passing) >= max_results:
                break
    return passing
