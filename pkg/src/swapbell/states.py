"""Dense state-vector core for a handful of polarization qubits.

Conventions (fixed across the whole package):
  * basis ordering: the first particle label is the most significant bit;
  * bit value 0 is |H>, bit value 1 is |V>;
  * amplitudes are a dense complex vector of length 2**n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ATOL_ALG = 1e-12        # algebraic identities
ATOL_COMMUTE = 1e-10    # numerical commutator check
ATOL_NORM = 1e-9        # "is this state normalized" guard

KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
# diagonal basis
KET_HBAR = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
KET_VBAR = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
# circular basis
KET_R = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)
KET_L = np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


class LabelCollisionError(ValueError):
    """Tensor factors share a particle label."""


class LabelMismatchError(ValueError):
    """Operands are defined over different particle labels."""


class DimensionMismatchError(ValueError):
    """Operator and state dimensions disagree."""


class NotNormalizedError(ValueError):
    """Operation requires a normalized state."""


class NonCommutingError(ValueError):
    """Joint measurement of observables that do not commute."""


@dataclass(frozen=True)
class StateVector:
    """Pure state of named polarization qubits."""

    amplitudes: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise LabelCollisionError(f"duplicate particle labels: {self.labels}")
        if amps.shape != (2 ** len(self.labels),):
            raise DimensionMismatchError(
                f"{len(self.labels)} labels need {2 ** len(self.labels)} amplitudes, "
                f"got shape {amps.shape}"
            )

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = ATOL_NORM) -> bool:
        return abs(self.norm() - 1.0) < atol

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, self.labels)


@dataclass(frozen=True)
class DenseOperator:
    """Dense complex matrix acting on a 2**k dimensional space."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {m.shape}")
        if m.shape[0] & (m.shape[0] - 1):
            raise DimensionMismatchError(f"dimension {m.shape[0]} is not a power of 2")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ObservableSpec:
    """Tensor product of single-qubit Pauli factors over named particles.

    `factors` maps particle label -> axis in {"X", "Z", "I"}; unnamed
    particles get the identity when realized.
    """

    factors: dict = field(default_factory=dict)

    def __post_init__(self):
        for label, axis in self.factors.items():
            if axis not in PAULI:
                raise ValueError(f"unknown axis {axis!r} for particle {label!r}")

    def name(self) -> str:
        parts = [f"{ax.lower()}{lbl}" for lbl, ax in self.factors.items() if ax != "I"]
        return "".join(parts) if parts else "identity"


def ket(symbols: str, labels: tuple[str, ...] | None = None) -> StateVector:
    """Product state from polarization symbols, e.g. ket("HV") = |HV>.

    Accepted symbols: H, V, D (=H-bar), A (=V-bar), R, L.
    """
    table = {"H": KET_H, "V": KET_V, "D": KET_HBAR, "A": KET_VBAR,
             "R": KET_R, "L": KET_L}
    if labels is None:
        labels = tuple(str(i + 1) for i in range(len(symbols)))
    amps = np.array([1.0], dtype=complex)
    for sym in symbols:
        amps = np.kron(amps, table[sym])
    return StateVector(amps, labels)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product with concatenated labels."""
    common = set(a.labels) & set(b.labels)
    if common:
        raise LabelCollisionError(f"labels appear in both factors: {sorted(common)}")
    return StateVector(np.kron(a.amplitudes, b.amplitudes), a.labels + b.labels)


def reorder(s: StateVector, new_labels: tuple[str, ...]) -> StateVector:
    """Permute the qubits of `s` so they appear in `new_labels` order."""
    if set(new_labels) != set(s.labels) or len(new_labels) != len(s.labels):
        raise LabelMismatchError(f"{new_labels} is not a permutation of {s.labels}")
    n = s.num_qubits
    perm = [s.labels.index(lbl) for lbl in new_labels]
    amps = s.amplitudes.reshape((2,) * n).transpose(perm).reshape(-1)
    return StateVector(amps.copy(), tuple(new_labels))


def realize(obs: ObservableSpec, labels: tuple[str, ...]) -> DenseOperator:
    """Kronecker product of the per-qubit factors in label order."""
    unknown = set(obs.factors) - set(labels)
    if unknown:
        raise LabelMismatchError(f"observable names unknown particles: {sorted(unknown)}")
    m = np.array([[1.0]], dtype=complex)
    for lbl in labels:
        m = np.kron(m, PAULI[obs.factors.get(lbl, "I")])
    return DenseOperator(m)


def apply(op: DenseOperator, s: StateVector) -> StateVector:
    if op.dim != s.amplitudes.shape[0]:
        raise DimensionMismatchError(f"operator dim {op.dim} vs state dim {s.amplitudes.shape[0]}")
    return StateVector(op.entries @ s.amplitudes, s.labels)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in `a`."""
    if a.labels != b.labels:
        raise LabelMismatchError(f"labels differ: {a.labels} vs {b.labels}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(op: DenseOperator, s: StateVector) -> float:
    """<s|op|s> as a real number; `s` must be normalized."""
    if not s.is_normalized():
        raise NotNormalizedError(f"state norm {s.norm()} is not 1")
    val = complex(np.vdot(s.amplitudes, op.entries @ s.amplitudes))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag}; operator not Hermitian?")
    return val.real


def commutator_norm(a: DenseOperator, b: DenseOperator) -> float:
    return float(np.linalg.norm(a.entries @ b.entries - b.entries @ a.entries))


def measure_joint(
    s: StateVector,
    commuting: list[ObservableSpec],
    rng: np.random.Generator,
) -> tuple[list[int], StateVector]:
    """Projectively measure a list of commuting +-1 observables.

    Returns the sampled simultaneous eigenvalues and the collapsed state.
    """
    if not s.is_normalized():
        raise NotNormalizedError(f"state norm {s.norm()} is not 1")
    ops = [realize(o, s.labels) for o in commuting]
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            cn = commutator_norm(ops[i], ops[j])
            if cn >= ATOL_COMMUTE:
                raise NonCommutingError(
                    f"observables {commuting[i].name()} and {commuting[j].name()} "
                    f"do not commute (norm {cn})"
                )
    vec = s.amplitudes.copy()
    eye = np.eye(len(vec), dtype=complex)
    outcomes = []
    for op in ops:
        plus = 0.5 * (eye + op.entries) @ vec
        p_plus = float(np.vdot(plus, plus).real)
        if rng.random() < p_plus:
            outcomes.append(+1)
            vec = plus / np.sqrt(p_plus)
        else:
            minus = 0.5 * (eye - op.entries) @ vec
            outcomes.append(-1)
            vec = minus / np.sqrt(1.0 - p_plus)
    return outcomes, StateVector(vec, s.labels)
