import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeromass.field_maps import fields_to_wavefunction, packing, wavefunction_to_fields
from zeromass.harness import make_initial_em
from zeromass.representations import REPRESENTATIONS, build_rep, with_sign
from zeromass.solver import (
    FieldState,
    GridSpec,
    PlaneWaveSpec,
    SpectralPropagator,
    SpinorField,
    UncertifiedRepresentationError,
    centered_difference_budget,
    curl,
    divergence,
    evolve,
    gradient,
    l2_norm,
    l2_rel_diff,
    mode_propagator,
    plane_wave,
    residual_generalized_maxwell,
    spectral_derivative,
)

SMALL = GridSpec(n=8, steps=5)
wavevectors = st.tuples(*[st.floats(-5, 5, allow_nan=False)] * 3).filter(lambda k: np.linalg.norm(k) > 1e-3)


def eig_propagator(rep, k, t, c=1.0):
    """Oracle: diagonalize the Hermitian symbol M . k numerically."""
    h = np.tensordot(np.asarray(k, dtype=float), np.stack([m.to_numpy() for m in rep.spatial]), axes=1)
    w, v = np.linalg.eigh(h)
    return v @ np.diag(np.exp(-1j * rep.sign_convention * c * t * w)) @ v.conj().T


def random_field(grid, m, seed):
    rng = np.random.default_rng(seed)
    shape = (m,) + (grid.n,) * 3
    return SpinorField(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


class TestGrid:
    @pytest.mark.parametrize("kw", [{"n": 5}, {"n": 2}, {"box": 0}, {"dt": -1}, {"c": 0}])
    def test_rejects_invalid(self, kw):
        with pytest.raises(ValueError):
            GridSpec(**kw)

    def test_wavenumbers(self):
        g = GridSpec(n=8, box=4.0)
        m = np.rint(g.wavevectors()[0][:, 0, 0] / g.k0).astype(int)
        assert sorted(m) == list(range(-4, 4))
        assert not g.dealias_mask()[4, 0, 0]

    def test_times(self):
        assert np.allclose(GridSpec(steps=3, dt=0.5).times(), [0, 0.5, 1.0])


class TestPropagator:
    @pytest.mark.parametrize("name", REPRESENTATIONS)
    @settings(max_examples=15, deadline=None)
    @given(k=wavevectors, t=st.floats(0, 10))
    def test_closed_form_matches_eigendecomposition(self, name, k, t):
        rep = build_rep(name)
        assert np.max(np.abs(mode_propagator(rep, k, t) - eig_propagator(rep, k, t))) <= 1e-12

    @pytest.mark.parametrize("name", REPRESENTATIONS)
    @settings(max_examples=15, deadline=None)
    @given(k=wavevectors, t=st.floats(-10, 10))
    def test_unitary(self, name, k, t):
        p = mode_propagator(build_rep(name), k, t)
        assert np.max(np.abs(p.conj().T @ p - np.eye(len(p)))) <= 1e-14

    def test_zero_mode_is_identity(self):
        assert np.array_equal(mode_propagator(build_rep("SIGMA"), (0, 0, 0), 3.0), np.eye(4))

    def test_zero_and_constant_fields(self):
        rep = build_rep("SIGMA_TILDE")
        assert np.array_equal(evolve(rep, SpinorField.zeros(SMALL, 4), 1.3).values, np.zeros((4, 8, 8, 8)))
        const = SpinorField.uniform(SMALL, [1, 2j, -1, 0.5])
        assert np.allclose(evolve(rep, const, 1.3).values, const.values, atol=1e-15)

    @pytest.mark.parametrize("name", REPRESENTATIONS)
    def test_norm_and_group_property(self, name):
        rep = build_rep(name)
        psi = random_field(SMALL, rep.dim, 3)
        a = evolve(rep, evolve(rep, psi, 0.7), 0.4)
        b = evolve(rep, psi, 1.1)
        assert l2_rel_diff(a, b) <= 1e-12
        # Nyquist modes are removed by the first application; later ones preserve the norm
        assert abs(l2_norm(evolve(rep, a, 2.0)) / l2_norm(a) - 1) <= 1e-12

    def test_uncertified_rep_rejected(self):
        from dataclasses import replace
        rep = build_rep("WEYL")
        bad = replace(rep, spatial=(rep.spatial[0], rep.spatial[0], rep.spatial[2]))
        with pytest.raises(UncertifiedRepresentationError):
            SpectralPropagator(bad, SMALL)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evolve(build_rep("WEYL"), SpinorField.zeros(SMALL, 4), 1.0)

    def test_nan_rejected(self):
        v = np.zeros((2, 8, 8, 8), dtype=complex)
        v[0, 0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            SpinorField(SMALL, v)


class TestPlaneWave:
    def test_weyl_examples(self):
        g = GridSpec(n=8)
        rep = build_rep("WEYL")
        psi, w = plane_wave(rep, g, PlaneWaveSpec((0, 0, 1), 1))
        assert np.allclose(psi.values[:, 0, 0, 0], [1, 0]) and w == pytest.approx(2 * np.pi / g.box)
        psi, w = plane_wave(rep, g, PlaneWaveSpec((0, 0, 1), -1))
        assert np.allclose(psi.values[:, 0, 0, 0], [0, 1]) and w == pytest.approx(-2 * np.pi / g.box)

    @pytest.mark.parametrize("mode", [(1, 0, 0), (0, 2, 1), (1, -1, 3), (-2, 3, 1)])
    @pytest.mark.parametrize("h", [1, -1])
    def test_sigma_eigenvector(self, mode, h):
        rep = build_rep("SIGMA")
        psi, _ = plane_wave(rep, SMALL, PlaneWaveSpec(mode, h))
        k = np.asarray(mode, float) / np.linalg.norm(mode)
        mk = np.tensordot(k, np.stack([m.to_numpy() for m in rep.spatial]), axes=1)
        chi = psi.values[:, 0, 0, 0]
        assert np.max(np.abs(mk @ chi - h * chi)) <= 1e-14

    def test_sign_flip_reverses_frequency(self):
        rep = with_sign(build_rep("WEYL"), -1)
        _, w = plane_wave(rep, SMALL, PlaneWaveSpec((1, 0, 0), 1))
        assert w == pytest.approx(-1.0)

    def test_errors(self):
        with pytest.raises(ValueError):
            PlaneWaveSpec((0, 0, 0))
        with pytest.raises(ValueError):
            PlaneWaveSpec((1, 0, 0), 2)
        with pytest.raises(ValueError):
            plane_wave(build_rep("WEYL"), SMALL, PlaneWaveSpec((4, 0, 0)))


class TestSpectralCalculus:
    def test_sine_derivative(self):
        g = GridSpec(n=8, box=3.0)
        x = g.coordinates()[0]
        f = np.sin(2 * np.pi * x / g.box)
        d = spectral_derivative(f, 0, g)
        assert np.max(np.abs(d - 2 * np.pi / g.box * np.cos(2 * np.pi * x / g.box))) <= 1e-12
        assert np.max(np.abs(spectral_derivative(np.ones_like(x), 1, g))) == 0

    def test_div_curl_and_curl_grad(self):
        g = GridSpec(n=16)
        rng = np.random.default_rng(0)
        v = rng.standard_normal((3, 16, 16, 16))
        assert np.max(np.abs(divergence(curl(v, g), g))) <= 1e-12
        assert np.max(np.abs(curl(gradient(v[0], g), g))) <= 1e-12

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            spectral_derivative(np.zeros((4, 4, 4)), 3, GridSpec(n=4))


class TestNorms:
    def test_zero_and_self(self):
        z = SpinorField.zeros(SMALL, 2)
        assert l2_norm(z) == 0 and l2_rel_diff(z, z) == 0
        x = random_field(SMALL, 2, 1)
        assert l2_rel_diff(x, x) == 0

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            l2_rel_diff(SpinorField.zeros(SMALL, 2), SpinorField.zeros(GridSpec(n=8, box=1.0), 2))


class TestResiduals:
    grid = GridSpec(n=16, dt=0.02, steps=12)

    def _trajectory(self, rep_name, pname, c=None, sources=True):
        pack = packing(pname)
        state = make_initial_em(self.grid, 5, band=2, with_sources=sources)
        prop = SpectralPropagator(build_rep(rep_name), self.grid, c)
        return [wavefunction_to_fields(pack, p)
                for p in prop.trajectory(fields_to_wavefunction(pack, state), self.grid.times())]

    def _budget(self, series):
        return centered_difference_budget(self.grid, self.grid.k0 * 2 * np.sqrt(3), series.field_norm)

    def test_theta_within_budget(self):
        series = residual_generalized_maxwell(self._trajectory("ALPHA_STANDARD", "THETA"), self.grid)
        assert all(series.within(self._budget(series)).values())
        assert len(series.times) == self.grid.steps - 2

    def test_wrong_speed_flagged(self):
        traj = self._trajectory("ALPHA_STANDARD", "THETA", c=1.3)
        series = residual_generalized_maxwell(traj, self.grid)
        assert not all(series.within(self._budget(series)).values())

    def test_zero_field(self):
        z = [FieldState.zeros(self.grid) for _ in range(4)]
        series = residual_generalized_maxwell(z, self.grid)
        assert all(np.all(v == 0) for v in series.residuals.values())

    def test_too_few_snapshots(self):
        with pytest.raises(ValueError):
            residual_generalized_maxwell([FieldState.zeros(self.grid)] * 2, self.grid)

    def test_reality_preserved(self):
        pack = packing("PHI")
        state = make_initial_em(self.grid, 2, band=2, with_sources=True)
        psi = evolve(build_rep("SIGMA"), fields_to_wavefunction(pack, state), 0.9)
        re = np.concatenate([psi.values.real, psi.values.imag])
        u = np.tensordot(pack.left_inverse.to_numpy(), re, axes=1)
        assert np.max(np.abs(u.imag)) <= 1e-12
        back = pack.apply(u.real)
        assert np.max(np.abs(back - psi.values)) <= 1e-12
