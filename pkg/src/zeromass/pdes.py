"""Exact first-order linear PDE systems over the eight real field components.

An equation is a coefficient vector over 32 slots, one per (variable,
derivative) pair with derivative in (t, x, y, z); slot index is
``4 * variable + derivative``.  Systems are compared through their reduced
row-echelon forms, so two systems are equivalent exactly when their
coefficient rows span the same space.  Units: ``c = 1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .exact import ExactMatrix, ExactScalar, ONE, ZERO, identity, rref
from .field_maps import (
    AS_PRINTED,
    DEFAULT_CONVENTIONS,
    Convention,
    FieldPacking,
    Var,
    VARIABLES,
    packing,
    sk_packing,
    SK_TERMS,
)
from .representations import RepresentationSet, build_rep, projector, with_sign

__all__ = [
    "Var",
    "DERIVATIVES",
    "N_SLOTS",
    "slot",
    "LinearPDESystem",
    "EquivalenceVerdict",
    "expand",
    "maxwell_reference",
    "systems_equivalent",
    "variable_swap",
    "constraint_subsystem",
    "divergence_equations",
    "contains",
    "Claim",
    "CLAIMS",
    "ClaimResult",
    "check_claim",
    "convention_search",
    "sk_sign_search",
    "constraint_claims",
]

DERIVATIVES = ("t", "x", "y", "z")
N_SLOTS = 8 * len(DERIVATIVES)


def slot(var: int, deriv: int) -> int:
    return 4 * int(var) + deriv


@dataclass(frozen=True)
class LinearPDESystem:
    """Homogeneous first-order system; ``rows`` are the equations as given."""

    rows: tuple[tuple[ExactScalar, ...], ...]
    label: str = ""

    def __post_init__(self):
        if any(len(r) != N_SLOTS for r in self.rows):
            raise ValueError(f"every equation needs {N_SLOTS} slot coefficients")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], label: str = "") -> "LinearPDESystem":
        return cls(tuple(tuple(ExactScalar.coerce(x) for x in r) for r in rows), label)

    @cached_property
    def canonical(self) -> tuple[tuple[ExactScalar, ...], ...]:
        return tuple(tuple(r) for r in rref(self.rows)[0])

    @property
    def rank(self) -> int:
        return len(self.canonical)

    def touches(self, var: int) -> bool:
        s = slot(var, 0)
        return any(any(r[s:s + 4]) for r in self.canonical)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "rank": self.rank,
            "canonical": [equation_terms(r) for r in self.canonical],
            "pretty": [pretty_equation(r) for r in self.canonical],
        }

    def pretty(self, canonical: bool = False) -> str:
        rows = self.canonical if canonical else [r for r in self.rows if any(r)]
        return "\n".join(pretty_equation(r) for r in rows)


@dataclass(frozen=True)
class EquivalenceVerdict:
    equal: bool
    witness: tuple[ExactScalar, ...] | None = None
    witness_from: str | None = None

    def __bool__(self):
        return self.equal

    def to_dict(self) -> dict:
        d = {"equal": self.equal}
        if self.witness is not None:
            d["witness"] = {"from": self.witness_from, "equation": pretty_equation(self.witness),
                            "terms": equation_terms(self.witness)}
        return d


def _split_real(complex_rows: Iterable[Sequence[ExactScalar]]) -> list[list[ExactScalar]]:
    """Each complex equation on real unknowns is two real equations."""
    out = []
    for r in complex_rows:
        out.append([x.real for x in r])
        out.append([x.imag for x in r])
    return out


def _slot_rows(time_part: ExactMatrix | None, space_parts: Sequence[ExactMatrix]) -> list[list[ExactScalar]]:
    dim = space_parts[0].rows
    rows = []
    for r in range(dim):
        row = [ZERO] * N_SLOTS
        for v in range(8):
            if time_part is not None:
                row[slot(v, 0)] = time_part[r, v]
            for d, part in enumerate(space_parts, 1):
                row[slot(v, d)] = part[r, v]
        rows.append(row)
    return rows


def expand(rep: RepresentationSet, p: FieldPacking) -> LinearPDESystem:
    """Substitute ``psi = L u`` into ``d/dt psi + sign (M . grad) psi = 0`` and split real/imaginary parts."""
    if p.dim != rep.dim:
        raise ValueError(f"packing {p.name} has {p.dim} components, {rep.name} acts on {rep.dim}")
    space = [(m @ p.L) * rep.sign_convention for m in rep.spatial]
    rows = _split_real(_slot_rows(p.L, space))
    return LinearPDESystem.from_rows(rows, f"{rep.name}[{rep.sign_convention:+d}] x {p.name}")


def maxwell_reference(with_sources: bool) -> LinearPDESystem:
    """Generalized Maxwell equations at ``c = 1`` in the order
    div E, div B, Ampere (3), Faraday (3)::

        div E + dE0/dt = 0,  div B + dB0/dt = 0,
        dE/dt - curl B + grad E0 = 0,  dB/dt + curl E + grad B0 = 0

    Without sources every E0/B0 slot is zero.
    """
    def row():
        return [0] * N_SLOTS

    rows = []
    for vec, scalar in ((Var.E1, Var.E0), (Var.B1, Var.B0)):
        r = row()
        for a in range(3):
            r[slot(vec + a, a + 1)] = 1
        if with_sources:
            r[slot(scalar, 0)] = 1
        rows.append(r)
    cyclic = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
    # dE/dt - curl B + grad E0, then dB/dt + curl E + grad B0
    for target, other, curl_sign, scalar in ((Var.E1, Var.B1, -1, Var.E0), (Var.B1, Var.E1, 1, Var.B0)):
        for i, j, k in cyclic:
            r = row()
            r[slot(target + i, 0)] = 1
            r[slot(other + k, j + 1)] += curl_sign
            r[slot(other + j, k + 1)] -= curl_sign
            if with_sources:
                r[slot(scalar, i + 1)] = 1
            rows.append(r)
    label = "generalized Maxwell" if with_sources else "Maxwell"
    return LinearPDESystem.from_rows(rows, label)


def _in_row_space(vec: Sequence[ExactScalar], canonical: Sequence[Sequence[ExactScalar]]) -> bool:
    return len(rref(list(canonical) + [list(vec)])[0]) == len(canonical)


def systems_equivalent(a: LinearPDESystem, b: LinearPDESystem) -> EquivalenceVerdict:
    if a.canonical == b.canonical:
        return EquivalenceVerdict(True)
    for src, mine, other in (("a", a, b), ("b", b, a)):
        for r in mine.canonical:
            if not _in_row_space(r, other.canonical):
                return EquivalenceVerdict(False, r, src)
    raise AssertionError("distinct reduced forms must differ in row space")


def contains(system: LinearPDESystem, equations: LinearPDESystem) -> bool:
    """True iff every equation of ``equations`` lies in the row space of ``system``."""
    return all(_in_row_space(r, system.canonical) for r in equations.canonical)


def variable_swap(system: LinearPDESystem, a: int, b: int) -> LinearPDESystem:
    perm = list(range(N_SLOTS))
    for d in range(4):
        perm[slot(a, d)], perm[slot(b, d)] = slot(b, d), slot(a, d)
    rows = [tuple(r[perm[s]] for s in range(N_SLOTS)) for r in system.rows]
    return LinearPDESystem(tuple(rows), f"{system.label} ({VARIABLES[a]}<->{VARIABLES[b]})")


def constraint_subsystem(rep: RepresentationSet, p: FieldPacking, proj: ExactMatrix) -> LinearPDESystem:
    """Purely spatial equations ``(1 - P)(M . grad)(P L u) = 0``."""
    if proj @ proj != proj:
        raise ValueError("projector is not idempotent")
    if proj.rows != rep.dim or p.dim != rep.dim:
        raise ValueError("projector, representation and packing dimensions differ")
    q = identity(rep.dim) - proj
    space = [(q @ m @ proj @ p.L) * rep.sign_convention for m in rep.spatial]
    rows = _split_real(_slot_rows(None, space))
    return LinearPDESystem.from_rows(rows, f"constraints {rep.name} x {p.name}")


def divergence_equations() -> LinearPDESystem:
    """``div E = 0`` and ``div B = 0``."""
    rows = []
    for vec in (Var.E1, Var.B1):
        r = [0] * N_SLOTS
        for a in range(3):
            r[slot(vec + a, a + 1)] = 1
        rows.append(r)
    return LinearPDESystem.from_rows(rows, "div E = 0, div B = 0")


# -- rendering ---------------------------------------------------------------

_SUP = {"1": "¹", "2": "²", "3": "³", "0": "⁰"}


def _var_name(v: int) -> str:
    name = VARIABLES[v]
    return name[0] + _SUP[name[1]]


def equation_terms(row: Sequence[ExactScalar]) -> dict[str, str]:
    """Sparse ``{"d<deriv> <var>": coefficient}`` view with rational strings."""
    return {f"d{DERIVATIVES[s % 4]} {VARIABLES[s // 4]}": str(x) for s, x in enumerate(row) if x}


def _fmt(coef: ExactScalar, text: str, first: bool) -> str:
    if coef == ONE:
        return text if first else f"+ {text}"
    if coef == -ONE:
        return f"-{text}" if first else f"- {text}"
    if not coef.im and coef.re < 0:
        return f"-{-coef.re}·{text}" if first else f"- {-coef.re}·{text}"
    return f"{coef}·{text}" if first else f"+ ({coef})·{text}"


def pretty_equation(row: Sequence[ExactScalar]) -> str:
    """Render one equation, folding divergence and curl patterns into ∇· and ∇× terms."""
    coeffs = {s: x for s, x in enumerate(row) if x}
    terms: list[tuple[ExactScalar, str]] = []
    for vec in (Var.E1, Var.B1):
        letter = VARIABLES[vec][0]
        div_slots = [slot(vec + a, a + 1) for a in range(3)]
        vals = [coeffs.get(s) for s in div_slots]
        if vals[0] is not None and all(v == vals[0] for v in vals):
            terms.append((vals[0], f"∇·{letter}"))
            for s in div_slots:
                del coeffs[s]
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            plus, minus = slot(vec + k, j + 1), slot(vec + j, k + 1)
            a = coeffs.get(plus)
            if a is not None and coeffs.get(minus) == -a:
                terms.append((a, f"(∇×{letter}){_SUP[str(i + 1)]}"))
                del coeffs[plus], coeffs[minus]
    for s, x in coeffs.items():
        terms.append((x, f"∂{DERIVATIVES[s % 4]}{_var_name(s // 4)}"))
    if not terms:
        return "0 = 0"
    # time derivatives first, then by text
    terms.sort(key=lambda t: (not t[1].startswith("∂t"), t[1]))
    return " ".join(_fmt(c, t, k == 0) for k, (c, t) in enumerate(terms)) + " = 0"


# -- claims and convention search ----------------------------------------------

@dataclass(frozen=True)
class Claim:
    name: str
    rep: str
    packing: str
    reference: str  # maxwell | generalized | generalized_swapped | expand:<PACKING>


CLAIMS = (
    Claim("SIGMA x RS_SPINOR = Maxwell", "SIGMA", "RS_SPINOR", "maxwell"),
    Claim("SIGMA_TILDE x MO = Maxwell", "SIGMA_TILDE", "MO", "maxwell"),
    Claim("ALPHA_STANDARD x SK = Maxwell", "ALPHA_STANDARD", "SK", "maxwell"),
    Claim("ALPHA_STANDARD x GAMMA5_SK = ALPHA_STANDARD x SK", "ALPHA_STANDARD", "GAMMA5_SK", "expand:SK"),
    Claim("ALPHA_STANDARD x THETA = generalized Maxwell", "ALPHA_STANDARD", "THETA", "generalized"),
    Claim("SIGMA x PHI = generalized Maxwell", "SIGMA", "PHI", "generalized"),
    Claim("SIGMA_TILDE x PHI_TILDE = generalized Maxwell (E0<->B0)", "SIGMA_TILDE", "PHI_TILDE",
          "generalized_swapped"),
)

_RS_PACKINGS = ("RS_SPINOR", "MO", "PHI", "PHI_TILDE")
_F0_PACKINGS = ("PHI", "PHI_TILDE")


def _reference(claim: Claim, rep: RepresentationSet) -> LinearPDESystem:
    if claim.reference == "maxwell":
        return maxwell_reference(False)
    if claim.reference == "generalized":
        return maxwell_reference(True)
    if claim.reference == "generalized_swapped":
        return variable_swap(maxwell_reference(True), Var.E0, Var.B0)
    if claim.reference.startswith("expand:"):
        return expand(rep, packing(claim.reference.split(":", 1)[1]))
    raise ValueError(f"unknown reference {claim.reference!r}")


@dataclass
class ClaimResult:
    claim: Claim
    evolution_sign: int
    convention: Convention | None
    verdict: EquivalenceVerdict
    system: LinearPDESystem

    def to_dict(self) -> dict:
        return {
            "claim": self.claim.name,
            "evolution_sign": self.evolution_sign,
            "convention": None if self.convention is None else self.convention.to_dict(),
            **self.verdict.to_dict(),
        }


def check_claim(claim: Claim, evolution_sign: int = 1, convention: Convention | None = None) -> ClaimResult:
    """Decide one claim under an evolution sign and (for complex-vector packings) a convention."""
    rep = with_sign(build_rep(claim.rep), evolution_sign)
    if claim.packing in _RS_PACKINGS:
        convention = convention or DEFAULT_CONVENTIONS[claim.packing]
        p = packing(claim.packing, convention)
    else:
        convention = None
        p = packing(claim.packing)
    system = expand(rep, p)
    return ClaimResult(claim, evolution_sign, convention, systems_equivalent(system, _reference(claim, rep)), system)


def _candidate_conventions(packing_name: str) -> list[Convention | None]:
    if packing_name not in _RS_PACKINGS:
        return [None]
    f0s = [(1, 1), (1, -1), (-1, 1), (-1, -1)] if packing_name in _F0_PACKINGS else [(1, 1)]
    return [Convention(rs, f0) for rs in (1, -1) for f0 in f0s]


@dataclass
class ConventionSearch:
    claim: Claim
    as_printed: ClaimResult
    results: list[ClaimResult]

    @property
    def passing(self) -> list[ClaimResult]:
        return [r for r in self.results if r.verdict.equal]

    @property
    def confirmed(self) -> bool:
        return bool(self.passing)

    @property
    def winner(self) -> ClaimResult | None:
        """First passing result, preferring the printed evolution sign, then the printed RS sign."""
        return self.passing[0] if self.passing else None

    def to_dict(self) -> dict:
        w = self.winner
        return {
            "claim": self.claim.name,
            "as_printed": self.as_printed.to_dict(),
            "confirmed": self.confirmed,
            "winner": None if w is None else w.to_dict(),
            "passing": [
                {"evolution_sign": r.evolution_sign,
                 "convention": None if r.convention is None else r.convention.to_dict()}
                for r in self.passing
            ],
            "tried": len(self.results),
        }


def convention_search(claim: Claim) -> ConventionSearch:
    """Try every documented convention for ``claim``; results are in preference order."""
    as_printed = check_claim(claim, 1, AS_PRINTED if claim.packing in _RS_PACKINGS else None)
    results = [check_claim(claim, sign, conv)
               for sign in (1, -1) for conv in _candidate_conventions(claim.packing)]
    return ConventionSearch(claim, as_printed, results)


def sk_sign_search() -> dict:
    """Every sign pattern on the six printed SK coefficients that yields Maxwell."""
    rep = build_rep("ALPHA_STANDARD")
    target = maxwell_reference(False)
    passing = []
    for signs in itertools.product((1, -1), repeat=len(SK_TERMS)):
        if systems_equivalent(expand(rep, sk_packing(signs)), target).equal:
            passing.append(signs)
    labels = [f"{'' if c.im == 0 else 'i'}{VARIABLES[v]}@{comp}" for comp, v, c in SK_TERMS]
    return {
        "coefficients": labels,
        "as_printed_passes": (1,) * len(SK_TERMS) in passing,
        "passing_sign_patterns": [list(s) for s in passing],
        "tried": 2 ** len(SK_TERMS),
    }


def constraint_claims() -> dict[str, dict]:
    """The R / R-tilde constraint subsystems and whether they contain the divergence pair."""
    div = divergence_equations()
    out = {}
    for rep_name, pname, proj in (("SIGMA", "RS_SPINOR", "R"), ("SIGMA_TILDE", "MO", "R_TILDE")):
        sub = constraint_subsystem(build_rep(rep_name), packing(pname), projector(proj))
        out[f"{rep_name} x {pname} with {proj}"] = {
            "contains_divergences": contains(sub, div),
            "equal_to_divergences": systems_equivalent(sub, div).equal,
            "system": sub.to_dict(),
        }
    return out
