import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeromass.field_maps import fields_to_wavefunction, packing
from zeromass.harness import (
    FORMULATIONS,
    Check,
    Tolerances,
    make_initial_em,
    random_spinor,
    run_constraint_monitor,
    run_duality,
    run_generalized_maxwell,
    run_neutrino_consistency,
)
from zeromass.representations import build_rep
from zeromass.solver import (
    FieldState,
    GridSpec,
    PlaneWaveSpec,
    SpectralPropagator,
    SpinorField,
    divergence,
    l2_norm,
    plane_wave,
)

GRID = GridSpec(n=16, steps=21)


class TestInitialData:
    def test_divergence_free(self):
        s = make_initial_em(GRID, 3, band=4)
        assert np.max(np.abs(divergence(s.E, GRID))) <= 1e-12
        assert np.max(np.abs(divergence(s.B, GRID))) <= 1e-12
        assert not s.E0.any() and not s.B0.any()

    def test_deterministic(self):
        a, b = make_initial_em(GRID, 9), make_initial_em(GRID, 9)
        assert np.array_equal(a.stack(), b.stack())
        assert not np.array_equal(a.stack(), make_initial_em(GRID, 10).stack())

    def test_sources_nonzero(self):
        s = make_initial_em(GRID, 7, band=1, with_sources=True)
        assert np.max(np.abs(s.E0)) > 0

    @pytest.mark.parametrize("band", [0, 8, 9])
    def test_band_too_large(self, band):
        with pytest.raises(ValueError):
            make_initial_em(GRID, 1, band=band)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2 ** 31), st.integers(1, 7))
    def test_band_limit_respected(self, seed, band):
        s = make_initial_em(GRID, seed, band=band)
        m = np.rint(np.abs(GRID.wavevectors()) / GRID.k0)
        hat = np.abs(np.fft.fftn(s.E, axes=(1, 2, 3))).max(axis=0)
        assert hat[np.any(m > band, axis=0)].max() <= 1e-10


class TestDuality:
    def test_all_three_agree(self):
        r = run_duality(GRID, 4)
        assert r.verdict
        assert r.pairwise_diff.max() <= 1e-10
        diag = np.einsum("tii->ti", r.pairwise_diff)
        assert not diag.any()
        assert np.array_equal(r.pairwise_diff, r.pairwise_diff.transpose(0, 2, 1))

    def test_self_comparison_is_zero(self):
        r = run_duality(GRID, 4, ["SIGMA_TILDE+MO", "SIGMA_TILDE+MO"])
        assert r.pairwise_diff.max() == 0

    def test_wrong_speed_grows(self):
        g = GridSpec(n=16, steps=21)
        r = run_duality(g, 4, ["SIGMA+RS_SPINOR", "ALPHA_STANDARD+SK"], c_overrides={"SIGMA+RS_SPINOR": 1.01})
        d = r.pairwise_diff[:, 0, 1]
        assert not r.verdict
        assert np.all(np.diff(d) > 0)
        assert d[-1] > 1e-3  # t = 1

    def test_needs_two(self):
        with pytest.raises(ValueError):
            run_duality(GRID, 1, ["SIGMA+RS_SPINOR"])
        with pytest.raises(ValueError):
            run_duality(GRID, 1, ["SIGMA+RS_SPINOR", "BOGUS"])

    def test_verdict_tracks_tolerance(self):
        r = run_duality(GRID, 4, tolerances=Tolerances(duality_diff=0.0, norm_drift=0.0, energy_drift=0.0))
        assert r.verdict == all(c.value == 0 for c in r.checks)

    def test_report_serializes(self):
        d = run_duality(GridSpec(n=8, steps=3), 1, band=2).to_dict()
        assert d["provenance"]["seed"] == 1 and d["verdict"] == "pass"
        assert set(d["norm_drift"]) == set(FORMULATIONS)


class TestNeutrino:
    def test_branches(self):
        r = run_neutrino_consistency(GRID, 2)
        assert r.verdict, [c.to_dict() for c in r.checks if not c.passed]
        assert r.data == {"weyl_sign_branch_a": -1, "weyl_sign_branch_b": -1}

    def test_zero_spinor(self):
        r = run_neutrino_consistency(GRID, 2, xi=SpinorField.zeros(GRID, 2))
        assert all(c.value == 0 for c in r.checks)


class TestConstraints:
    @pytest.mark.parametrize("form", list(FORMULATIONS))
    def test_divergence_free(self, form):
        r = run_constraint_monitor(GRID, 6, form)
        assert r.verdict, [c.to_dict() for c in r.checks if not c.passed]

    def test_zero_data(self):
        r = run_constraint_monitor(GRID, 6, initial=FieldState.zeros(GRID))
        assert all(c.value == 0 for c in r.checks)


def test_generalized_small_grid():
    r = run_generalized_maxwell(GridSpec(n=16, steps=12), 8, band=3)
    assert r.verdict, [c.to_dict() for c in r.checks if not c.passed]
    names = [c.name for c in r.checks]
    assert "SIGMA_TILDE+PHI_TILDE: unswapped ordering is rejected" in names


@pytest.mark.parametrize("rep_name,pname", [("SIGMA", "RS_SPINOR"), ("SIGMA_TILDE", "MO"), ("ALPHA_STANDARD", "SK")])
def test_helicity_sector_closure(rep_name, pname):
    rep = build_rep(rep_name)
    g = GridSpec(n=8)
    modes = [(1, 0, 0), (0, 1, 2), (-1, 2, 1)]
    psi = sum(plane_wave(rep, g, PlaneWaveSpec(m, 1))[0].values for m in modes)
    prop = SpectralPropagator(rep, g)
    out = np.fft.fftn(prop.evolve(SpinorField(g, psi), 1.7).values, axes=(1, 2, 3))
    # (1 - P+) per mode, P+ = (1 + M.k_hat)/2
    leak = 0.5 * (out - np.einsum("ab...,b...->a...", prop.mk, out))
    assert np.max(np.abs(leak)) <= 1e-12 * np.max(np.abs(out))


def test_check_default_pass_rule():
    assert Check("x", 1e-11, 1e-10).passed and not Check("x", 2e-10, 1e-10).passed


def test_random_spinor_is_deterministic():
    assert np.array_equal(random_spinor(GRID, 1).values, random_spinor(GRID, 1).values)


@pytest.mark.parametrize("pname,ratio", [("MO", 1.0), ("SK", 1.0), ("THETA", 1.0), ("PHI_TILDE", 1.0),
                                         ("RS_SPINOR", 0.5), ("PHI", 0.5)])
def test_wavefunction_norm_is_field_energy(pname, ratio):
    s = make_initial_em(GRID, 1)
    psi = fields_to_wavefunction(packing(pname), s)
    assert l2_norm(psi) ** 2 == pytest.approx(ratio * s.energy(), rel=1e-13)
