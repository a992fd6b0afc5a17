import json
from fractions import Fraction
from pathlib import Path

import pytest

from oracles import sympy_oracle as so
from zeromass.exact import ExactScalar
from zeromass.field_maps import AS_PRINTED, Convention, Var, packing
from zeromass.pdes import (
    CLAIMS,
    N_SLOTS,
    LinearPDESystem,
    check_claim,
    constraint_claims,
    contains,
    convention_search,
    divergence_equations,
    expand,
    maxwell_reference,
    sk_sign_search,
    slot,
    systems_equivalent,
    variable_swap,
)
from zeromass.representations import REPRESENTATIONS, build_rep

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


def _exact(x):
    return ExactScalar(Fraction(str(so.sp.re(x))), Fraction(str(so.sp.im(x))))


ORACLE_NAMES = dict(zip([c.name for c in CLAIMS], so.CLAIMS))


def test_frozen_oracle_claim_table_matches_engine():
    for claim in CLAIMS:
        rows = FROZEN["claims"][ORACLE_NAMES[claim.name]]
        for row in rows:
            conv = Convention(row["rs_sign"], tuple(row["f0"]))
            res = check_claim(claim, row["evolution_sign"], conv)
            assert res.verdict.equal == row["holds"], (claim.name, row)


@pytest.mark.parametrize("claim", CLAIMS, ids=lambda c: c.name)
def test_every_claim_confirmed_under_some_convention(claim):
    search = convention_search(claim)
    assert search.confirmed
    assert search.winner.evolution_sign == 1


def test_as_printed_verdicts():
    printed = {c.name: convention_search(c).as_printed.verdict.equal for c in CLAIMS}
    holds = {name for name, ok in printed.items() if ok}
    assert holds == {"ALPHA_STANDARD x SK = Maxwell",
                     "ALPHA_STANDARD x GAMMA5_SK = ALPHA_STANDARD x SK",
                     "ALPHA_STANDARD x THETA = generalized Maxwell"}


def test_as_printed_failure_has_witness():
    res = check_claim(CLAIMS[0], 1, AS_PRINTED)
    assert not res.verdict.equal
    assert res.verdict.witness is not None


def test_sk_sign_search_matches_oracle():
    out = sk_sign_search()
    assert out["as_printed_passes"]
    assert out["passing_sign_patterns"] == FROZEN["sk_sign_patterns"]
    assert out["tried"] == 64


def test_constraint_subsystems():
    for name, v in constraint_claims().items():
        assert v["contains_divergences"] and v["equal_to_divergences"]
        assert FROZEN["constraints"][name]["equals_divergences"]


def test_expansion_matches_oracle_rows():
    for rep in ("SIGMA", "SIGMA_TILDE", "ALPHA_STANDARD"):
        for pname in ("THETA", "PHI", "PHI_TILDE"):
            ours = expand(build_rep(rep), packing(pname))
            conv = packing(pname).convention or Convention()
            ref = so.expand(so.REPS[rep], so.packings(conv.rs_sign, conv.f0)[pname])
            ref_rows = [[_exact(x) for x in ref.row(i)] for i in range(ref.rows)]
            assert systems_equivalent(ours, LinearPDESystem.from_rows(ref_rows)).equal


@pytest.mark.parametrize("rep", REPRESENTATIONS[1:])
@pytest.mark.parametrize("pname", ["THETA", "PHI", "PHI_TILDE"])
def test_bijective_packings_rank_eight(rep, pname):
    assert expand(build_rep(rep), packing(pname)).rank == 8


def test_maxwell_reference_shape():
    m = maxwell_reference(True)
    assert m.rank == 8
    assert len(m.rows[0]) == N_SLOTS
    assert maxwell_reference(False).rank == 8
    assert contains(maxwell_reference(False), divergence_equations())


def test_swap_is_involution():
    m = maxwell_reference(True)
    assert variable_swap(variable_swap(m, Var.E0, Var.B0), Var.E0, Var.B0).canonical == m.canonical
    assert not systems_equivalent(variable_swap(m, Var.E0, Var.B0), m).equal


def test_slot_layout():
    assert slot(Var.E1, 0) == 0 and slot(Var.B0, 3) == 31


def test_pretty_print():
    text = maxwell_reference(True).pretty()
    assert text.splitlines()[0] == "∂tE⁰ + ∇·E = 0"
    assert "(∇×B)¹" in text



def test_frozen_oracle_is_current():
    for claim, rows in FROZEN["claims"].items():
        live = [bool(so.claim_holds(claim, r["evolution_sign"], r["rs_sign"], tuple(r["f0"]))) for r in rows]
        assert live == [r["holds"] for r in rows], claim
