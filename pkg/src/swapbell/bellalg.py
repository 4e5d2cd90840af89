"""Bell bases, the two joint-eigenstate selections, and algebra checks.

Two families of maximally entangled two-qubit states are used:

  * standard:  psi+- = (|HV> +- |VH>)/sqrt2,  phi+- = (|HH> +- |VV>)/sqrt2
  * rotated:   chi+- = (|H>|Hbar> +- |V>|Vbar>)/sqrt2,
               omega+- = (|V>|Hbar> +- |H>|Vbar>)/sqrt2

plus the four-qubit states eps(+1), eps(-1) that are simultaneous
eigenstates of all four swapping correlations and of the two apparatus
products z2z3.x2x3 and z2x3.x2z3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import (
    ATOL_ALG,
    DenseOperator,
    ObservableSpec,
    StateVector,
    apply,
    inner,
    ket,
    realize,
    reorder,
    tensor,
)

STANDARD_FAMILY = ("psi+", "psi-", "phi+", "phi-")
ROTATED_FAMILY = ("chi+", "chi-", "omega+", "omega-")

SQ2 = np.sqrt(2.0)

# amplitudes on (HH, HV, VH, VV), fixed sign conventions
_BELL_AMPS = {
    "psi+": np.array([0, 1, 1, 0], dtype=complex) / SQ2,
    "psi-": np.array([0, 1, -1, 0], dtype=complex) / SQ2,
    "phi+": np.array([1, 0, 0, 1], dtype=complex) / SQ2,
    "phi-": np.array([1, 0, 0, -1], dtype=complex) / SQ2,
    "chi+": np.array([1, 1, 1, -1], dtype=complex) / 2,
    "chi-": np.array([1, 1, -1, 1], dtype=complex) / 2,
    "omega+": np.array([1, -1, 1, 1], dtype=complex) / 2,
    "omega-": np.array([-1, 1, 1, 1], dtype=complex) / 2,
}


def bell_state(label: str, particles: tuple[str, str] = ("1", "2")) -> StateVector:
    """One of the eight named Bell states on a pair of particles."""
    if label not in _BELL_AMPS:
        raise ValueError(f"unknown Bell label {label!r}")
    return StateVector(_BELL_AMPS[label].copy(), tuple(particles))


def psi_minus_pair() -> StateVector:
    """The swapping input |psi-}_12 |psi-}_34 on particles (1,2,3,4)."""
    return tensor(bell_state("psi-", ("1", "2")), bell_state("psi-", ("3", "4")))


def epsilon_state(sign: int, family: str = "standard") -> StateVector:
    """The four-qubit state eps(sign) on particles (1,2,3,4).

    Built as (|b_a>_14 |b_a>_23 + |b_b>_14 |b_b>_23)/sqrt2 where for
    sign=+1 (b_a, b_b) = (psi-, phi+) in the standard family and
    (chi-, omega+) in the rotated one; both constructions agree.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if family == "standard":
        pair = ("psi-", "phi+") if sign == +1 else ("psi+", "phi-")
    elif family == "rotated":
        pair = ("chi-", "omega+") if sign == +1 else ("chi+", "omega-")
    else:
        raise ValueError(f"unknown family {family!r}")
    total = np.zeros(16, dtype=complex)
    for lbl in pair:
        prod = tensor(bell_state(lbl, ("1", "4")), bell_state(lbl, ("2", "3")))
        total += reorder(prod, ("1", "2", "3", "4")).amplitudes
    return StateVector(total / SQ2, ("1", "2", "3", "4"))


def bell_decompose(
    s: StateVector,
    pairing: tuple[tuple[str, str], tuple[str, str]],
    family: str = "standard",
) -> dict[tuple[str, str], complex]:
    """Coefficients of a 4-qubit state in a product Bell basis.

    Returns {(label_first_pair, label_second_pair): coefficient} with
    sum |coeff|^2 equal to the squared norm of `s`.
    """
    (p, q), (r, t) = pairing
    if sorted((p, q, r, t)) != sorted(s.labels):
        raise ValueError(f"pairing {pairing} does not partition labels {s.labels}")
    labels = STANDARD_FAMILY if family == "standard" else ROTATED_FAMILY
    coeffs = {}
    for la in labels:
        for lb in labels:
            basis = tensor(bell_state(la, (p, q)), bell_state(lb, (r, t)))
            basis = reorder(basis, s.labels)
            coeffs[(la, lb)] = inner(basis, s)
    return coeffs


@dataclass(frozen=True)
class EigenCheck:
    relation: str
    state: str
    expected: int | None
    observed: int | None
    residual: float

    @property
    def ok(self) -> bool:
        return self.observed is not None and self.observed == self.expected

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "state": self.state,
            "expected": self.expected,
            "observed": self.observed,
            "residual": self.residual,
        }


def verify_eigenrelation(
    obs: ObservableSpec, s: StateVector, atol: float = 1e-10
) -> tuple[int | None, float]:
    """Test whether `s` is a +-1 eigenstate of `obs`.

    Returns (eigenvalue, residual) when the Euclidean residual
    ||obs s - lam s|| is below `atol` for lam in {+1, -1}; otherwise
    (None, r) where r is the residual minimized over all real lam.
    """
    out = apply(realize(obs, s.labels), s)
    for lam in (+1, -1):
        res = float(np.linalg.norm(out.amplitudes - lam * s.amplitudes))
        if res < atol:
            return lam, res
    # least-squares eigenvalue: lam* = Re<s|obs|s> / <s|s>
    norm_sq = float(np.vdot(s.amplitudes, s.amplitudes).real)
    lam_star = float(np.vdot(s.amplitudes, out.amplitudes).real) / norm_sq
    res = float(np.linalg.norm(out.amplitudes - lam_star * s.amplitudes))
    return None, res


def operator_identity_check() -> dict:
    """Check z2z3.x2x3 = -z2x3.x2z3 as 4x4 matrices on particles (2,3)."""
    labels = ("2", "3")
    zz = realize(ObservableSpec({"2": "Z", "3": "Z"}), labels).entries
    xx = realize(ObservableSpec({"2": "X", "3": "X"}), labels).entries
    zx = realize(ObservableSpec({"2": "Z", "3": "X"}), labels).entries
    xz = realize(ObservableSpec({"2": "X", "3": "Z"}), labels).entries
    lhs = zz @ xx
    rhs = -zx @ xz
    max_diff = float(np.max(np.abs(lhs - rhs)))
    return {
        "relation": "z2z3.x2x3 = -z2x3.x2z3",
        "max_elementwise_diff": max_diff,
        "ok": max_diff < 1e-14,
    }


# --- full verification manifest -------------------------------------------

def _pair_eigenchecks() -> list[EigenCheck]:
    """The sixteen two-qubit eigenrelations of the two Bell families."""
    cases = [
        ("ZZ", "phi+", +1), ("ZZ", "phi-", +1), ("ZZ", "psi+", -1), ("ZZ", "psi-", -1),
        ("XX", "phi+", +1), ("XX", "phi-", -1), ("XX", "psi+", +1), ("XX", "psi-", -1),
        ("ZX", "chi+", +1), ("ZX", "chi-", +1), ("ZX", "omega+", -1), ("ZX", "omega-", -1),
        ("XZ", "chi+", +1), ("XZ", "chi-", -1), ("XZ", "omega+", +1), ("XZ", "omega-", -1),
    ]
    checks = []
    for axes, lbl, expected in cases:
        obs = ObservableSpec({"1": axes[0], "2": axes[1]})
        observed, res = verify_eigenrelation(obs, bell_state(lbl, ("1", "2")))
        checks.append(EigenCheck(f"{axes[0].lower()}(x){axes[1].lower()}", lbl,
                                 expected, observed, res))
    return checks


SWAP_CORRELATIONS = [
    ObservableSpec({"1": "Z", "2": "Z", "3": "Z", "4": "Z"}),
    ObservableSpec({"1": "X", "2": "X", "3": "X", "4": "X"}),
    ObservableSpec({"1": "Z", "2": "Z", "3": "X", "4": "X"}),
    ObservableSpec({"1": "X", "2": "X", "3": "Z", "4": "Z"}),
]


def _swap_eigenchecks() -> list[EigenCheck]:
    """All four swapping correlations, eigenvalue +1, on three states."""
    states = {
        "psi-psi-": psi_minus_pair(),
        "eps(+1)": epsilon_state(+1),
        "eps(-1)": epsilon_state(-1),
    }
    checks = []
    for obs in SWAP_CORRELATIONS:
        for name, s in states.items():
            observed, res = verify_eigenrelation(obs, s)
            checks.append(EigenCheck(obs.name(), name, +1, observed, res))
    return checks


def _apparatus_product_checks() -> list[EigenCheck]:
    """Sign pattern of the two apparatus products on eps(+-1)."""
    zz = realize(ObservableSpec({"2": "Z", "3": "Z"}), ("1", "2", "3", "4"))
    xx = realize(ObservableSpec({"2": "X", "3": "X"}), ("1", "2", "3", "4"))
    zx = realize(ObservableSpec({"2": "Z", "3": "X"}), ("1", "2", "3", "4"))
    xz = realize(ObservableSpec({"2": "X", "3": "Z"}), ("1", "2", "3", "4"))
    prod_a = DenseOperator(zz.entries @ xx.entries)
    prod_b = DenseOperator(zx.entries @ xz.entries)
    checks = []
    for sign in (+1, -1):
        s = epsilon_state(sign)
        for name, op, expected in [
            ("z2z3.x2x3", prod_a, sign),
            ("z2x3.x2z3", prod_b, -sign),
        ]:
            out = apply(op, s)
            res = float(np.linalg.norm(out.amplitudes - expected * s.amplitudes))
            observed = expected if res < 1e-10 else None
            checks.append(EigenCheck(name, f"eps({sign:+d})", expected, observed, res))
    return checks


# Reference coefficients for the two Bell-basis expansions of the
# swapping input |psi-}|psi-} over the (1,4)(2,3) pairing.  With the ket
# conventions above, the direct expansion carries an overall factor -1
# relative to these reference signs (the relative sign pattern is exact);
# the check therefore aligns a global +-1 phase and records it.
DECOMPOSITION_REFERENCE = {
    "standard": {
        ("psi-", "psi-"): 0.5, ("psi+", "psi+"): -0.5,
        ("phi+", "phi+"): 0.5, ("phi-", "phi-"): -0.5,
    },
    "rotated": {
        ("omega+", "omega+"): 0.5, ("omega-", "omega-"): -0.5,
        ("chi+", "chi+"): -0.5, ("chi-", "chi-"): 0.5,
    },
}


def _decomposition_checks() -> list[dict]:
    s = psi_minus_pair()
    pairing = (("1", "4"), ("2", "3"))
    results = []
    for family, want in DECOMPOSITION_REFERENCE.items():
        got = bell_decompose(s, pairing, family)
        for phase in (+1, -1):
            residual = max(abs(got[key] - phase * want.get(key, 0.0)) for key in got)
            if residual < ATOL_ALG:
                break
        results.append({
            "relation": f"bell-decomposition[{family}]",
            "state": "psi-psi-",
            "expected": None,
            "observed": None,
            "global_phase": phase,
            "residual": float(residual),
            "ok": residual < ATOL_ALG,
        })
    return results


def algebra_manifest() -> dict:
    """Run every algebraic check and return a JSON-ready manifest."""
    entries = []
    for chk in _pair_eigenchecks() + _swap_eigenchecks() + _apparatus_product_checks():
        d = chk.to_dict()
        d["ok"] = chk.ok and chk.residual < 1e-10
        entries.append(d)
    entries.extend(_decomposition_checks())
    ident = operator_identity_check()
    entries.append({
        "relation": ident["relation"],
        "state": "(operator identity)",
        "expected": None,
        "observed": None,
        "residual": ident["max_elementwise_diff"],
        "ok": ident["ok"],
    })
    # eps construction consistency: both family forms agree, and
    # (eps(+1) - eps(-1))/sqrt2 reproduces the swapping input
    for sign in (+1, -1):
        diff = float(np.linalg.norm(
            epsilon_state(sign, "standard").amplitudes
            - epsilon_state(sign, "rotated").amplitudes
        ))
        entries.append({
            "relation": "eps families agree",
            "state": f"eps({sign:+d})",
            "expected": None,
            "observed": None,
            "residual": diff,
            "ok": diff < ATOL_ALG,
        })
    # same global -1 as the decomposition: the difference of the two eps
    # states reconstructs the swapping input up to overall sign
    recon = (epsilon_state(+1).amplitudes - epsilon_state(-1).amplitudes) / SQ2
    target = psi_minus_pair().amplitudes
    phase, res = +1, float(np.linalg.norm(recon - target))
    alt = float(np.linalg.norm(recon + target))
    if alt < res:
        phase, res = -1, alt
    entries.append({
        "relation": "(eps(+1) - eps(-1))/sqrt2 = psi-psi- (up to global sign)",
        "state": "psi-psi-",
        "expected": None,
        "observed": None,
        "global_phase": phase,
        "residual": res,
        "ok": res < ATOL_ALG,
    })
    return {"checks": entries, "all_ok": all(e["ok"] for e in entries)}
