"""Exhaustive local-hidden-variable analysis over the eight local elements.

Every deterministic local model assigns +-1 to each of the eight
observables (z1, x1; z2z3, x2x3, z2x3, x2z3; z4, x4).  There are only
2**8 = 256 assignments, so all questions about the model class reduce to
enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

# fixed lexicographic order used for enumeration and witness reporting
LER_IDS = ("z1", "x1", "z2z3", "x2x3", "z2x3", "x2z3", "z4", "x4")


@dataclass(frozen=True)
class Constraint:
    """Requires the product of the named values to equal +-1."""

    monomial: tuple[str, ...]
    required_product: int
    name: str = ""

    def satisfied_by(self, values: dict[str, int]) -> bool:
        prod = 1
        for ler in self.monomial:
            prod *= values[ler]
        return prod == self.required_product


@dataclass(frozen=True)
class Assignment:
    """A total +-1 valuation of the eight local elements."""

    values: dict

    def __post_init__(self):
        if set(self.values) != set(LER_IDS):
            raise ValueError(f"assignment must value exactly {LER_IDS}")
        if any(v not in (+1, -1) for v in self.values.values()):
            raise ValueError("values must be +-1")

    @property
    def m(self) -> int:
        return self.values["z2z3"]

    @property
    def n(self) -> int:
        return self.values["z2x3"]

    @property
    def epsilon(self) -> int:
        return self.values["z2z3"] * self.values["x2x3"]

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.values[k] for k in LER_IDS)


# the four perfect-correlation constraints shared by all swapping states
PERFECT_CORRELATIONS = [
    Constraint(("z1", "z2z3", "z4"), +1, "zzz"),
    Constraint(("x1", "x2x3", "x4"), +1, "xxx"),
    Constraint(("z1", "z2x3", "x4"), +1, "zzx.x"),
    Constraint(("x1", "x2z3", "z4"), +1, "xxz.z"),
]


def identity_constraints(epsilon: int) -> list[Constraint]:
    """The value constraints forced by the operator identity, for fixed eps."""
    if epsilon not in (+1, -1):
        raise ValueError(f"epsilon must be +-1, got {epsilon}")
    return [
        Constraint(("z2z3", "x2x3"), epsilon, f"zz.xx={epsilon:+d}"),
        Constraint(("z2x3", "x2z3"), -epsilon, f"zx.xz={-epsilon:+d}"),
    ]


def paper_constraints(epsilon: int = +1) -> tuple[list[Constraint], list[Constraint]]:
    """(perfect-correlation constraints, identity-pair constraints)."""
    return list(PERFECT_CORRELATIONS), identity_constraints(epsilon)


def all_assignments() -> list[Assignment]:
    return [
        Assignment(dict(zip(LER_IDS, vals)))
        for vals in product((+1, -1), repeat=len(LER_IDS))
    ]


def enumerate_satisfying(constraints: list[Constraint]) -> list[Assignment]:
    """All of the 256 assignments satisfying every constraint, in fixed order."""
    return [
        a for a in all_assignments()
        if all(c.satisfied_by(a.values) for c in constraints)
    ]


def avn_certificate() -> dict:
    """Mechanize the all-versus-nothing contradiction.

    The six relations (four perfect correlations plus the identity pair)
    are jointly unsatisfiable for either epsilon branch, yet every
    five-relation subset is satisfiable -- and each witness then takes
    the definite value opposite to the omitted relation's requirement.
    """
    report = {"branches": {}, "unsat_both_branches": True, "leave_one_out_ok": True}
    for eps in (+1, -1):
        six = PERFECT_CORRELATIONS + identity_constraints(eps)
        full_sat = enumerate_satisfying(six)
        branch = {
            "epsilon": eps,
            "full_set_sat_count": len(full_sat),
            "leave_one_out": [],
        }
        if full_sat:
            report["unsat_both_branches"] = False
        for omit_idx, omitted in enumerate(six):
            subset = [c for i, c in enumerate(six) if i != omit_idx]
            witnesses = enumerate_satisfying(subset)
            # on every witness the omitted monomial takes one definite
            # value, and it is the opposite of the omitted requirement
            products = {
                _product(w.values, omitted.monomial) for w in witnesses
            }
            opposite_forced = products == {-omitted.required_product}
            if not (witnesses and opposite_forced):
                report["leave_one_out_ok"] = False
            branch["leave_one_out"].append({
                "omitted": omitted.name,
                "omitted_required": omitted.required_product,
                "sat_count": len(witnesses),
                "omitted_values_seen": sorted(products),
                "opposite_forced": opposite_forced,
                "first_witness": dict(zip(LER_IDS, witnesses[0].as_tuple())) if witnesses else None,
            })
        report["branches"][f"eps={eps:+d}"] = branch
    report["ok"] = report["unsat_both_branches"] and report["leave_one_out_ok"]
    return report


def _product(values: dict[str, int], monomial: tuple[str, ...]) -> int:
    prod = 1
    for ler in monomial:
        prod *= values[ler]
    return prod


def m_value(a: Assignment) -> int:
    """Value of the four-term correlation sum on a deterministic assignment."""
    v = a.values
    return (
        v["z1"] * v["z2z3"] * v["z4"]
        + v["x1"] * v["x2x3"] * v["x4"]
        + v["z1"] * v["z2x3"] * v["x4"]
        + v["x1"] * v["x2z3"] * v["z4"]
    )


def lhv_bound_m(constrained: bool = True) -> dict:
    """Extremize the correlation sum over deterministic assignments.

    With the identity pair enforced (either epsilon branch) the maximum
    is 2; unconstrained it is 4.
    """
    if constrained:
        # identity pair with derived epsilon: zz.xx and zx.xz must be opposite
        pool = [
            a for a in all_assignments()
            if a.values["z2z3"] * a.values["x2x3"]
            == -a.values["z2x3"] * a.values["x2z3"]
        ]
    else:
        pool = all_assignments()
    values = [m_value(a) for a in pool]
    max_value = max(values)
    min_value = min(values)
    argmax = [a for a, v in zip(pool, values) if v == max_value]
    return {
        "constrained": constrained,
        "max_value": max_value,
        "min_value": min_value,
        "argmax_count": len(argmax),
        "argmax": argmax,
    }


def chsh_value(m: int, n: int, epsilon: int, correlators: dict[str, float]) -> float:
    """The CHSH-type combination m*E(z1z4) + n*E(z1x4) - eps*n*E(x1z4) + eps*m*E(x1x4)."""
    for v in (m, n, epsilon):
        if v not in (+1, -1):
            raise ValueError(f"m, n, epsilon must be +-1, got {v}")
    required = {"z1z4", "z1x4", "x1z4", "x1x4"}
    if set(correlators) != required:
        raise ValueError(f"correlators must have keys {sorted(required)}")
    for key, val in correlators.items():
        if not -1.0 <= val <= 1.0:
            raise ValueError(f"correlator {key} = {val} out of [-1, 1]")
    return (
        m * correlators["z1z4"]
        + n * correlators["z1x4"]
        - epsilon * n * correlators["x1z4"]
        + epsilon * m * correlators["x1x4"]
    )


def assignment_correlators(a: Assignment) -> dict[str, float]:
    """Deterministic correlators E(s1 s4) induced by an assignment."""
    v = a.values
    return {
        "z1z4": float(v["z1"] * v["z4"]),
        "z1x4": float(v["z1"] * v["x4"]),
        "x1z4": float(v["x1"] * v["z4"]),
        "x1x4": float(v["x1"] * v["x4"]),
    }
