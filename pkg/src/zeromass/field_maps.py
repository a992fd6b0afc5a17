"""Linear maps from the eight real field components to complex wavefunctions.

Variable order is fixed: ``u = (E1, E2, E3, B1, B2, B3, E0, B0)``.  Symbolic
coefficients use ``c = 1``; numerically the stored B already carries the
factor ``c`` (see :class:`~zeromass.solver.FieldState`).

Two sign conventions are left open by the printed formulas and are
parameters here:

* ``rs_sign``: the complex field vector is ``F = E + rs_sign * i B``.
* ``f0 = (a, b)``: the scalar channel is ``F0 = a E0 + b i B0``.

``AS_PRINTED`` uses ``rs_sign = +1`` and ``F0 = E0 + i B0``.  The defaults in
``DEFAULT_CONVENTIONS`` are the ones the symbolic engine confirms (see
:func:`zeromass.pdes.convention_search`).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Sequence

import numpy as np

from .exact import HALF, I, ExactMatrix, ExactScalar, inverse, zeros
from .representations import gamma_matrices
from .solver import FieldState, SpinorField

__all__ = [
    "Var",
    "VARIABLES",
    "Convention",
    "AS_PRINTED",
    "DEFAULT_CONVENTIONS",
    "PACKINGS",
    "SK_TERMS",
    "FieldPacking",
    "OffImageError",
    "packing",
    "sk_packing",
    "fields_to_wavefunction",
    "wavefunction_to_fields",
    "rs_vector",
]


class Var(IntEnum):
    E1 = 0
    E2 = 1
    E3 = 2
    B1 = 3
    B2 = 4
    B3 = 5
    E0 = 6
    B0 = 7


VARIABLES = tuple(v.name for v in Var)


@dataclass(frozen=True)
class Convention:
    rs_sign: int = 1
    f0: tuple[int, int] = (1, 1)

    def __post_init__(self):
        if self.rs_sign not in (1, -1) or any(x not in (1, -1) for x in self.f0):
            raise ValueError("convention signs must be +1 or -1")

    def describe(self) -> str:
        a, b = self.f0
        f = f"F = E {'+' if self.rs_sign > 0 else '-'} icB"
        f0 = f"F0 = {'' if a > 0 else '-'}E0 {'+' if b > 0 else '-'} icB0"
        return f"{f}; {f0}"

    def to_dict(self) -> dict:
        return {"rs_sign": self.rs_sign, "f0": list(self.f0), "text": self.describe()}


AS_PRINTED = Convention()
DEFAULT_CONVENTIONS = {
    "RS_SPINOR": Convention(-1),
    "MO": Convention(-1),
    "PHI": Convention(-1, (-1, 1)),
    "PHI_TILDE": Convention(-1, (-1, -1)),
}

PACKINGS = ("RS_SPINOR", "MO", "SK", "GAMMA5_SK", "THETA", "PHI", "PHI_TILDE")

# (component, variable, coefficient) of the Simulik-Krivsky substitution at c = 1
SK_TERMS = (
    (0, Var.E3, I),
    (1, Var.E1, I),
    (1, Var.E2, ExactScalar(-1)),
    (2, Var.B3, ExactScalar(-1)),
    (3, Var.B2, -I),
    (3, Var.B1, ExactScalar(-1)),
)


class OffImageError(ValueError):
    """A wavefunction is not in the image of the packing, within tolerance."""

    def __init__(self, residual: float, location: tuple[int, ...], tol: float):
        self.residual = residual
        self.location = location
        self.tol = tol
        super().__init__(f"off-image residual {residual:.3e} at grid point {location} exceeds tol {tol:.3e}")


def _unit(v: int) -> ExactMatrix:
    return ExactMatrix([[1 if k == v else 0 for k in range(8)]])


def _rows(*forms: ExactMatrix) -> ExactMatrix:
    return ExactMatrix([f.row(0) for f in forms])


def _rs_forms(conv: Convention):
    s = ExactScalar(conv.rs_sign)
    F = [_unit(Var.E1 + k) + _unit(Var.B1 + k) * (s * I) for k in range(3)]
    a, b = conv.f0
    F0 = _unit(Var.E0) * a + _unit(Var.B0) * (I * b)
    return F, F0


@dataclass(frozen=True)
class FieldPacking:
    name: str
    L: ExactMatrix
    used_vars: tuple[int, ...]
    convention: Convention | None = None

    @property
    def dim(self) -> int:
        return self.L.rows

    @cached_property
    def realified(self) -> ExactMatrix:
        """Real ``2*dim x 8`` matrix ``[Re L; Im L]``."""
        re = [[x.real for x in self.L.row(i)] for i in range(self.dim)]
        im = [[x.imag for x in self.L.row(i)] for i in range(self.dim)]
        return ExactMatrix(re + im)

    @cached_property
    def image_rank(self) -> int:
        return self.realified.rank()

    @property
    def bijective(self) -> bool:
        return self.image_rank == 8 and 2 * self.dim == 8

    @cached_property
    def left_inverse(self) -> ExactMatrix:
        """Exact ``(A^T A)^-1 A^T`` for ``A`` the realified columns of ``used_vars``."""
        a = ExactMatrix([[r[v] for v in self.used_vars] for r in self.realified.tolist()])
        return inverse(a.T @ a) @ a.T

    @cached_property
    def _numeric(self):
        a = np.array([[complex(x).real for x in r] for r in self.realified.tolist()])[:, list(self.used_vars)]
        pinv = self.left_inverse.to_numpy().real
        off = None if self.bijective else np.eye(2 * self.dim) - a @ pinv
        return self.L.to_numpy(), pinv, off

    def apply_exact(self, u: Sequence) -> ExactMatrix:
        """Exact wavefunction (``dim x 1``) for one exact field vector."""
        return self.L @ ExactMatrix([[x] for x in u])

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Pointwise map for ``u`` of shape ``(8, ...)``."""
        return np.tensordot(self._numeric[0], u, axes=1)

    def to_dict(self) -> dict:
        d = {"name": self.name, "L": self.L.to_strings(),
             "used_vars": [VARIABLES[v] for v in self.used_vars], "image_rank": self.image_rank}
        if self.convention is not None:
            d["convention"] = self.convention.to_dict()
        return d


_EB = tuple(range(6))
_ALL = tuple(range(8))


def sk_packing(signs: Sequence[int] = (1,) * 6) -> FieldPacking:
    """The Simulik-Krivsky packing with each printed coefficient multiplied by ``signs[k]``."""
    if len(signs) != len(SK_TERMS):
        raise ValueError(f"need {len(SK_TERMS)} signs")
    rows = [[0] * 8 for _ in range(4)]
    for (comp, var, coef), s in zip(SK_TERMS, signs):
        rows[comp][var] = coef * s
    name = "SK" if all(s == 1 for s in signs) else "SK" + "".join("+" if s > 0 else "-" for s in signs)
    return FieldPacking(name, ExactMatrix(rows), _EB)


def packing(name: str, convention: Convention | None = None) -> FieldPacking:
    """Exact packing matrix ``L`` (``dim x 8``) for one of ``PACKINGS``.

    ``convention`` only affects the packings built from the complex field
    vector (RS_SPINOR, MO, PHI, PHI_TILDE); it defaults to the confirmed
    entry of ``DEFAULT_CONVENTIONS``.
    """
    key = name.upper()
    if key not in PACKINGS:
        raise ValueError(f"unknown packing {name!r}; expected one of {PACKINGS}")
    u = _unit
    if key == "SK":
        return sk_packing()
    if key == "GAMMA5_SK":
        L = gamma_matrices("standard")["g5"] @ sk_packing().L
        return FieldPacking("GAMMA5_SK", L, _EB)
    if key == "THETA":
        L = _rows(u(Var.E3) * I - u(Var.B0),
                  u(Var.E1) * I - u(Var.E2),
                  u(Var.E0) * I - u(Var.B3),
                  u(Var.B2) * (-I) - u(Var.B1))
        return FieldPacking("THETA", L, _ALL)

    conv = convention or DEFAULT_CONVENTIONS[key]
    F, F0 = _rs_forms(conv)
    if key == "RS_SPINOR":
        # inverse of F1 = p11 - p00, F2 = -i(p11 + p00), F3 = 2 p01
        p11 = (F[0] + F[1] * I) * HALF
        p00 = (-F[0] + F[1] * I) * HALF
        p01 = F[2] * HALF
        return FieldPacking("RS_SPINOR", _rows(p00, p01, p01, p11), _EB, conv)
    if key == "MO":
        return FieldPacking("MO", _rows(zeros(1, 8), F[0], F[1], F[2]), _EB, conv)
    if key == "PHI":
        z11 = F[2] + F0
        z12 = F[0] - F[1] * I
        z21 = F[0] + F[1] * I
        z22 = -F[2] + F0
        L = _rows(-z12 * HALF, z11 * HALF, -z22 * HALF, z21 * HALF)
        return FieldPacking("PHI", L, _ALL, conv)
    return FieldPacking("PHI_TILDE", _rows(F0, F[0], F[1], F[2]), _ALL, conv)


def fields_to_wavefunction(p: FieldPacking, state: FieldState) -> SpinorField:
    return SpinorField(state.grid, p.apply(state.stack()))


def wavefunction_to_fields(p: FieldPacking, psi: SpinorField, tol: float = 1e-10) -> FieldState:
    """Invert the packing pointwise with its exact left inverse.

    Raises :class:`OffImageError` when the largest off-image component
    exceeds ``tol``.  Bijective packings have no off-image part.
    """
    if psi.m != p.dim:
        raise ValueError(f"{p.name} produces {p.dim} components, field has {psi.m}")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    _, pinv, off = p._numeric
    psi_r = np.concatenate([psi.values.real, psi.values.imag])
    if off is not None:
        resid = np.max(np.abs(np.tensordot(off, psi_r, axes=1)), axis=0)
        worst = float(resid.max())
        if worst > tol:
            loc = np.unravel_index(int(np.argmax(resid)), resid.shape)
            raise OffImageError(worst, tuple(int(i) for i in loc), tol)
    u = np.zeros((8,) + psi.values.shape[1:])
    u[list(p.used_vars)] = np.tensordot(pinv, psi_r, axes=1)
    return FieldState.from_stack(psi.grid, u)


def rs_vector(E, B, c: float = 1.0) -> np.ndarray:
    """Riemann-Silberstein vector ``E + i c B``."""
    return np.asarray(E, dtype=float) + 1j * c * np.asarray(B, dtype=float)
