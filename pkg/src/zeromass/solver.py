"""Pseudo-spectral evolution of ``d/dt psi = -c*sign*(M . grad) psi`` on a periodic cube.

Each Fourier mode is propagated exactly.  Because the triple obeys the Pauli
algebra, ``(M . k_hat)^2 = 1`` and the exponential has the closed form

    exp(-i*sign*c*t*(M . k)) = cos(c|k|t) - i*sign*sin(c|k|t) (M . k_hat),

so the only error left is FFT roundoff.  Modes containing the Nyquist index
``-n/2`` are zeroed whenever a derivative or propagator is applied.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import fft

from .representations import RepresentationSet, verify_pauli_algebra

__all__ = [
    "GridSpec",
    "SpinorField",
    "FieldState",
    "PlaneWaveSpec",
    "UncertifiedRepresentationError",
    "SpectralPropagator",
    "evolve",
    "mode_propagator",
    "plane_wave",
    "spectral_derivative",
    "gradient",
    "divergence",
    "curl",
    "l2_norm",
    "l2_rel_diff",
    "ResidualSeries",
    "GENERALIZED_MAXWELL_EQUATIONS",
    "residual_generalized_maxwell",
    "centered_difference_budget",
]


class UncertifiedRepresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    n: int = 32
    box: float = 2 * np.pi
    c: float = 1.0
    dt: float = 0.05
    steps: int = 100

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ValueError(f"n must be even and >= 4, got {self.n}")
        if not (self.box > 0 and self.c > 0 and self.dt > 0):
            raise ValueError("box, c and dt must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    @property
    def spacing(self) -> float:
        return self.box / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** 3

    @property
    def k0(self) -> float:
        """Fundamental wavenumber ``2*pi/box``."""
        return 2 * np.pi / self.box

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.steps)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.spacing * np.arange(self.n)
        return tuple(np.meshgrid(x, x, x, indexing="ij"))

    def wavevectors(self) -> np.ndarray:
        """Array ``(3, n, n, n)`` of wavevector components."""
        return _wavevectors(self.n, self.box)

    def dealias_mask(self) -> np.ndarray:
        """True on modes free of the Nyquist index."""
        return _dealias_mask(self.n)


@lru_cache(maxsize=8)
def _wavevectors(n: int, box: float) -> np.ndarray:
    k1 = 2 * np.pi / box * np.fft.fftfreq(n, d=1.0 / n)
    k = np.stack(np.meshgrid(k1, k1, k1, indexing="ij"))
    k.setflags(write=False)
    return k


@lru_cache(maxsize=8)
def _dealias_mask(n: int) -> np.ndarray:
    m = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    ok = m != -n // 2
    mask = ok[:, None, None] & ok[None, :, None] & ok[None, None, :]
    mask.setflags(write=False)
    return mask


def _check_grid_values(grid: GridSpec, arr: np.ndarray, lead: tuple, what: str):
    want = lead + (grid.n,) * 3
    if arr.shape != want:
        raise ValueError(f"{what}: expected shape {want}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: non-finite values")


@dataclass
class SpinorField:
    """Complex ``m``-component field; ``values`` has shape ``(m, n, n, n)``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 4:
            raise ValueError("values must have shape (m, n, n, n)")
        _check_grid_values(self.grid, self.values, (self.values.shape[0],), "SpinorField")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @classmethod
    def zeros(cls, grid: GridSpec, m: int) -> "SpinorField":
        return cls(grid, np.zeros((m,) + (grid.n,) * 3, dtype=complex))

    @classmethod
    def uniform(cls, grid: GridSpec, vector: Sequence[complex]) -> "SpinorField":
        v = np.asarray(vector, dtype=complex)
        return cls(grid, np.broadcast_to(v[:, None, None, None], (len(v),) + (grid.n,) * 3).copy())


@dataclass
class FieldState:
    """Real fields E, B (shape ``(3, n, n, n)``) and scalar channels E0, B0.

    B is stored in units where the wave speed is absorbed, i.e. the stored
    array is ``c * B``; this matches packings written with ``c = 1``.
    """

    grid: GridSpec
    E: np.ndarray
    B: np.ndarray
    E0: np.ndarray = None
    B0: np.ndarray = None

    def __post_init__(self):
        shape = (self.grid.n,) * 3
        self.E = np.asarray(self.E, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        self.E0 = np.zeros(shape) if self.E0 is None else np.asarray(self.E0, dtype=float)
        self.B0 = np.zeros(shape) if self.B0 is None else np.asarray(self.B0, dtype=float)
        _check_grid_values(self.grid, self.E, (3,), "E")
        _check_grid_values(self.grid, self.B, (3,), "B")
        _check_grid_values(self.grid, self.E0, (), "E0")
        _check_grid_values(self.grid, self.B0, (), "B0")

    def stack(self) -> np.ndarray:
        """Components in variable order ``(E1, E2, E3, B1, B2, B3, E0, B0)``."""
        return np.concatenate([self.E, self.B, self.E0[None], self.B0[None]])

    @classmethod
    def from_stack(cls, grid: GridSpec, u: np.ndarray) -> "FieldState":
        return cls(grid, u[0:3], u[3:6], u[6], u[7])

    @classmethod
    def zeros(cls, grid: GridSpec) -> "FieldState":
        z = np.zeros((3,) + (grid.n,) * 3)
        return cls(grid, z, z.copy())

    def energy(self) -> float:
        """``integral(|E|^2 + |B|^2) dV``."""
        return float((np.sum(self.E ** 2) + np.sum(self.B ** 2)) * self.grid.cell_volume)


@dataclass(frozen=True)
class PlaneWaveSpec:
    mode: tuple[int, int, int]
    helicity: int = 1
    amplitude: complex = 1.0

    def __post_init__(self):
        if self.helicity not in (1, -1):
            raise ValueError("helicity must be +1 or -1")
        if len(self.mode) != 3 or not any(self.mode):
            raise ValueError(f"mode must be a nonzero integer 3-vector, got {self.mode}")


def _numeric_triple(rep: RepresentationSet) -> np.ndarray:
    return np.stack([m.to_numpy() for m in rep.spatial])


def _certify(rep: RepresentationSet):
    cert = verify_pauli_algebra(rep)
    if not cert.passed:
        names = ", ".join(c.name for c in cert.failures)
        raise UncertifiedRepresentationError(f"{rep.name} fails the Pauli algebra: {names}")


def mode_propagator(rep: RepresentationSet, k: Sequence[float], t: float, c: float = 1.0) -> np.ndarray:
    """Closed-form ``exp(-i*sign*c*t*(M . k))`` for a single wavevector."""
    k = np.asarray(k, dtype=float)
    kabs = np.linalg.norm(k)
    one = np.eye(rep.dim, dtype=complex)
    if kabs == 0:
        return one
    mk = np.tensordot(k / kabs, _numeric_triple(rep), axes=1)
    return np.cos(c * kabs * t) * one - 1j * rep.sign_convention * np.sin(c * kabs * t) * mk


class SpectralPropagator:
    """Exact per-mode propagator for one representation on one grid."""

    def __init__(self, rep: RepresentationSet, grid: GridSpec, c: float | None = None):
        _certify(rep)
        self.rep = rep
        self.grid = grid
        self.c = grid.c if c is None else c
        k = grid.wavevectors()
        self.kabs = np.sqrt(np.sum(k ** 2, axis=0))
        khat = np.divide(k, self.kabs, out=np.zeros_like(k), where=self.kabs > 0)
        # (m, m, n, n, n): the symbol M . k_hat per mode
        self.mk = np.einsum("iab,i...->ab...", _numeric_triple(rep), khat)
        self.mask = grid.dealias_mask()

    def apply_hat(self, psi_hat: np.ndarray, t: float) -> np.ndarray:
        phase = self.c * self.kabs * t
        rot = np.einsum("ab...,b...->a...", self.mk, psi_hat)
        out = np.cos(phase) * psi_hat - 1j * self.rep.sign_convention * np.sin(phase) * rot
        return out * self.mask

    def evolve(self, psi: SpinorField, t: float) -> SpinorField:
        if psi.m != self.rep.dim:
            raise ValueError(f"{self.rep.name} acts on {self.rep.dim} components, field has {psi.m}")
        if psi.grid.n != self.grid.n or psi.grid.box != self.grid.box:
            raise ValueError("field and propagator grids differ")
        psi_hat = fft.fftn(psi.values, axes=(1, 2, 3))
        return SpinorField(psi.grid, fft.ifftn(self.apply_hat(psi_hat, t), axes=(1, 2, 3)))

    def trajectory(self, psi: SpinorField, times: Iterable[float]):
        """Yield the evolved field at each time, transforming the initial data once."""
        psi_hat = fft.fftn(psi.values, axes=(1, 2, 3))
        for t in times:
            yield SpinorField(psi.grid, fft.ifftn(self.apply_hat(psi_hat, t), axes=(1, 2, 3)))


def evolve(rep: RepresentationSet, psi: SpinorField, t: float, c: float | None = None) -> SpinorField:
    if psi.m != rep.dim:
        raise ValueError(f"{rep.name} acts on {rep.dim} components, field has {psi.m}")
    return SpectralPropagator(rep, psi.grid, c).evolve(psi, t)


def plane_wave(rep: RepresentationSet, grid: GridSpec, spec: PlaneWaveSpec,
               c: float | None = None) -> tuple[SpinorField, float]:
    """Helicity eigenmode ``chi * exp(i k.x)`` and its frequency ``omega``.

    The field evolves as ``exp(i(k.x - omega t))`` with
    ``omega = sign * helicity * c|k|``.
    """
    _certify(rep)
    c = grid.c if c is None else c
    mode = np.asarray(spec.mode, dtype=int)
    if np.any(np.abs(mode) >= grid.n // 2):
        raise ValueError(f"mode {tuple(mode)} not representable on an n={grid.n} grid")
    k = grid.k0 * mode
    kabs = np.linalg.norm(k)
    mk = np.tensordot(k / kabs, _numeric_triple(rep), axes=1)
    proj = 0.5 * (np.eye(rep.dim) + spec.helicity * mk)
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    chi = proj[:, col] / np.linalg.norm(proj[:, col])
    x = grid.coordinates()
    phase = np.exp(1j * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]))
    values = spec.amplitude * chi[:, None, None, None] * phase[None]
    omega = rep.sign_convention * spec.helicity * c * kabs
    return SpinorField(grid, values), float(omega)


# -- spectral calculus ------------------------------------------------------

def spectral_derivative(f: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Derivative along spatial ``axis`` (0, 1, 2) of an array whose last three axes are the grid."""
    if axis not in (0, 1, 2):
        raise ValueError("axis must be 0, 1 or 2")
    f = np.asarray(f)
    k = grid.wavevectors()[axis] * grid.dealias_mask()
    out = fft.ifftn(1j * k * fft.fftn(f, axes=(-3, -2, -1)), axes=(-3, -2, -1))
    return out.real if np.isrealobj(f) else out


def gradient(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    return np.stack([spectral_derivative(f, a, grid) for a in range(3)])


def divergence(v: np.ndarray, grid: GridSpec) -> np.ndarray:
    return sum(spectral_derivative(v[a], a, grid) for a in range(3))


def curl(v: np.ndarray, grid: GridSpec) -> np.ndarray:
    d = lambda comp, ax: spectral_derivative(v[comp], ax, grid)
    return np.stack([d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)])


def _values(x) -> np.ndarray:
    if isinstance(x, SpinorField):
        return x.values
    if isinstance(x, FieldState):
        return x.stack()
    return np.asarray(x)


def l2_norm(psi, grid: GridSpec | None = None) -> float:
    """Grid-cell weighted L2 norm of a SpinorField, FieldState or raw array."""
    if grid is None:
        grid = psi.grid
    v = _values(psi)
    return float(np.sqrt(np.sum(np.abs(v) ** 2) * grid.cell_volume))


def l2_rel_diff(a, b) -> float:
    """``||a - b|| / max(||a||, ||b||)``, with ``0/0 = 0``."""
    ga, gb = getattr(a, "grid", None), getattr(b, "grid", None)
    if ga is not None and gb is not None and (ga.n, ga.box) != (gb.n, gb.box):
        raise ValueError("grid mismatch")
    va, vb = _values(a), _values(b)
    if va.shape != vb.shape:
        raise ValueError(f"shape mismatch {va.shape} vs {vb.shape}")
    num = np.sqrt(np.sum(np.abs(va - vb) ** 2))
    den = max(np.sqrt(np.sum(np.abs(va) ** 2)), np.sqrt(np.sum(np.abs(vb) ** 2)))
    return 0.0 if den == 0 else float(num / den)


# -- generalized Maxwell residuals ------------------------------------------

GENERALIZED_MAXWELL_EQUATIONS = (
    "div_E", "div_B",
    "ampere_1", "ampere_2", "ampere_3",
    "faraday_1", "faraday_2", "faraday_3",
)


@dataclass
class ResidualSeries:
    """Max-norm residual of each equation at interior snapshots."""

    times: np.ndarray
    residuals: dict[str, np.ndarray]
    field_norm: np.ndarray
    swapped: bool = False

    def max_residual(self) -> dict[str, float]:
        return {k: float(np.max(v)) for k, v in self.residuals.items()}

    def within(self, budget: np.ndarray | float) -> dict[str, bool]:
        return {k: bool(np.all(v <= budget)) for k, v in self.residuals.items()}


def centered_difference_budget(grid: GridSpec, kmax: float, field_norm) -> np.ndarray:
    """``max(1e-10, 5 (c kmax)^2 dt^2 ||field||)``: the centered time-difference allowance."""
    return np.maximum(1e-10, 5.0 * (grid.c * kmax) ** 2 * grid.dt ** 2 * np.asarray(field_norm))


def _spatial_terms(state: FieldState, grid: GridSpec, swapped: bool):
    # one forward transform of all eight channels, one batched inverse
    ax = (-3, -2, -1)
    u = fft.fftn(state.stack(), axes=ax)
    ik = 1j * grid.wavevectors() * grid.dealias_mask()
    e, b = u[0:3], u[3:6]
    e0, b0 = (u[7], u[6]) if swapped else (u[6], u[7])

    def curl_hat(v):
        return np.stack([ik[1] * v[2] - ik[2] * v[1], ik[2] * v[0] - ik[0] * v[2], ik[0] * v[1] - ik[1] * v[0]])

    out = np.empty((8,) + u.shape[1:], dtype=complex)
    out[0] = np.sum(ik * e, axis=0)
    out[1] = np.sum(ik * b, axis=0)
    out[2:5] = -curl_hat(b) + ik * e0
    out[5:8] = curl_hat(e) + ik * b0
    out = grid.c * fft.ifftn(out, axes=ax).real
    return {"div_E": out[0], "div_B": out[1], "ampere": out[2:5], "faraday": out[5:8]}


def residual_generalized_maxwell(trajectory: Iterable[FieldState], grid: GridSpec,
                                 swapped: bool = False) -> ResidualSeries:
    """Evaluate the generalized Maxwell system on consecutive snapshots spaced ``grid.dt``.

    With wave speed ``c`` the equations read

        dE0/dt + c div E = 0          dB0/dt + c div B = 0
        dE/dt - c curl B + c grad E0 = 0
        dB/dt + c curl E + c grad B0 = 0

    (``swapped`` exchanges the roles of E0 and B0).  Time derivatives are
    centered differences, so the residual is O(dt^2) for a true solution.
    Accepts any iterable, holding only three snapshots at a time.
    """
    window: list[FieldState] = []
    res = {k: [] for k in GENERALIZED_MAXWELL_EQUATIONS}
    norms, times = [], []
    for idx, state in enumerate(trajectory):
        window.append(state)
        if len(window) < 3:
            continue
        prev, mid, nxt = window
        dt2 = 2 * grid.dt
        e0n, b0n = (nxt.B0, nxt.E0) if swapped else (nxt.E0, nxt.B0)
        e0p, b0p = (prev.B0, prev.E0) if swapped else (prev.E0, prev.B0)
        sp = _spatial_terms(mid, grid, swapped)
        res["div_E"].append(np.max(np.abs((e0n - e0p) / dt2 + sp["div_E"])))
        res["div_B"].append(np.max(np.abs((b0n - b0p) / dt2 + sp["div_B"])))
        de = (nxt.E - prev.E) / dt2 + sp["ampere"]
        db = (nxt.B - prev.B) / dt2 + sp["faraday"]
        for a in range(3):
            res[f"ampere_{a + 1}"].append(np.max(np.abs(de[a])))
            res[f"faraday_{a + 1}"].append(np.max(np.abs(db[a])))
        norms.append(np.max(np.abs(mid.stack())))
        times.append((idx - 1) * grid.dt)
        window.pop(0)
    if not times:
        raise ValueError("need at least 3 snapshots")
    return ResidualSeries(np.asarray(times), {k: np.asarray(v) for k, v in res.items()},
                          np.asarray(norms), swapped)
