"""Named Pauli-algebra triples, their commutants, projectors and the neutrino transform.

All matrices are transcribed entry by entry.  Where the source writes a
matrix as a tensor product ``A (x) B``, the explicit entries agree with the
standard Kronecker product taken the other way round, ``kron(B, A)``; the
factorization table below stores the argument order that reproduces the
explicit matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .exact import (
    HALF,
    I,
    ExactMatrix,
    ExactScalar,
    anticommutator,
    block,
    commutator,
    conj_transpose,
    diag,
    identity,
    kron,
    zeros,
)

__all__ = [
    "SIGMA0", "SIGMA1", "SIGMA2", "SIGMA3", "PAULI",
    "REPRESENTATIONS", "PROJECTORS",
    "RepresentationSet", "IdentityCheck", "Certificate",
    "build_rep", "with_sign", "direction_matrix", "gamma_matrices",
    "verify_pauli_algebra", "verify_commutant", "verify_kronecker_factorizations",
    "verify_gamma_matrices", "verify_projectors", "verify_neutrino_transform",
    "projector", "neutrino_transform", "restrict_to_sector",
    "verify_mo_neutrino_reduction", "verify_spinor_neutrino_reduction",
    "algebra_certificates",
]

SIGMA0 = identity(2)
SIGMA1 = ExactMatrix([[0, 1], [1, 0]])
SIGMA2 = ExactMatrix([[0, -I], [I, 0]])
SIGMA3 = ExactMatrix([[1, 0], [0, -1]])
PAULI = (SIGMA1, SIGMA2, SIGMA3)

_O2 = zeros(2)
_ONE4 = identity(4)

# Explicit 4x4 matrices, copied entry by entry.
_SIGMA_EXPLICIT = (
    ExactMatrix([[0, 0, -1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, -1, 0, 0]]),
    ExactMatrix([[0, 0, I, 0], [0, 0, 0, I], [-I, 0, 0, 0], [0, -I, 0, 0]]),
    ExactMatrix([[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
)
_SIGMA_TILDE_EXPLICIT = (
    I * ExactMatrix([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]),
    I * ExactMatrix([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]]),
    I * ExactMatrix([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]),
)
_R = ExactMatrix([
    [1, 0, 0, 0],
    [0, Fraction(1, 2), Fraction(1, 2), 0],
    [0, Fraction(1, 2), Fraction(1, 2), 0],
    [0, 0, 0, 1],
])
_R_TILDE = diag(0, 1, 1, 1)

# S^i = sigma^i (x) sigma^0 and the tilde commutant, in kron argument order.
_S = tuple(kron(SIGMA0, s) for s in PAULI)
_S_TILDE = (kron(SIGMA0, SIGMA2), kron(SIGMA2, SIGMA3), kron(SIGMA2, SIGMA1))

# (label, explicit matrix, sign, kron args) -- explicit == sign * kron(*args)
KRON_FACTORIZATIONS = (
    ("Sigma1 = -sigma0 (x) sigma1", _SIGMA_EXPLICIT[0], -1, (SIGMA1, SIGMA0)),
    ("Sigma2 = -sigma0 (x) sigma2", _SIGMA_EXPLICIT[1], -1, (SIGMA2, SIGMA0)),
    ("Sigma3 = -sigma0 (x) sigma3", _SIGMA_EXPLICIT[2], -1, (SIGMA3, SIGMA0)),
    ("SigmaTilde1 = sigma2 (x) sigma3", _SIGMA_TILDE_EXPLICIT[0], 1, (SIGMA3, SIGMA2)),
    ("SigmaTilde2 = sigma0 (x) sigma2", _SIGMA_TILDE_EXPLICIT[1], 1, (SIGMA2, SIGMA0)),
    ("SigmaTilde3 = sigma2 (x) sigma1", _SIGMA_TILDE_EXPLICIT[2], 1, (SIGMA1, SIGMA2)),
)


def gamma_matrices(representation: str) -> dict[str, ExactMatrix]:
    """Dirac matrices ``g0..g3`` and the printed ``g5`` for ``'spinor'`` or ``'standard'``."""
    one = SIGMA0
    if representation == "spinor":
        g = [block([[_O2, one], [one, _O2]])]
        g += [block([[_O2, -s], [s, _O2]]) for s in PAULI]
        g5 = block([[one, _O2], [_O2, -one]])
    elif representation == "standard":
        g = [block([[one, _O2], [_O2, -one]])]
        g += [block([[_O2, s], [-s, _O2]]) for s in PAULI]
        g5 = block([[_O2, one], [one, _O2]])
    else:
        raise ValueError(f"unknown Dirac representation {representation!r}")
    return {"g0": g[0], "g1": g[1], "g2": g[2], "g3": g[3], "g5": g5}


@dataclass(frozen=True)
class RepresentationSet:
    """A Hermitian anticommuting triple used as ``d/dt psi = -c*sign*(M . grad) psi``."""

    name: str
    dim: int
    spatial: tuple[ExactMatrix, ExactMatrix, ExactMatrix]
    commutant: tuple[ExactMatrix, ...] = ()
    commutant_names: tuple[str, ...] = ()
    sign_convention: int = 1

    def __post_init__(self):
        if self.sign_convention not in (1, -1):
            raise ValueError("sign_convention must be +1 or -1")
        if len(self.spatial) != 3 or any(m.shape != (self.dim, self.dim) for m in self.spatial):
            raise ValueError(f"{self.name}: spatial triple must be three {self.dim}x{self.dim} matrices")


def _alpha(representation: str) -> tuple[ExactMatrix, ...]:
    g = gamma_matrices(representation)
    return tuple(g["g0"] @ g[f"g{i}"] for i in (1, 2, 3))


def build_rep(name: str) -> RepresentationSet:
    """Construct one of ``REPRESENTATIONS`` with sign convention +1."""
    key = name.upper()
    if key == "WEYL":
        return RepresentationSet("WEYL", 2, PAULI)
    if key == "SIGMA":
        return RepresentationSet("SIGMA", 4, _SIGMA_EXPLICIT, _S, ("S1", "S2", "S3"))
    if key == "SIGMA_TILDE":
        return RepresentationSet("SIGMA_TILDE", 4, _SIGMA_TILDE_EXPLICIT, _S_TILDE,
                                 ("S~1", "S~2", "S~3"))
    if key == "ALPHA_SPINOR":
        return RepresentationSet("ALPHA_SPINOR", 4, _alpha("spinor"),
                                 (gamma_matrices("spinor")["g5"],), ("gamma5",))
    if key == "ALPHA_STANDARD":
        return RepresentationSet("ALPHA_STANDARD", 4, _alpha("standard"),
                                 (gamma_matrices("standard")["g5"],), ("gamma5",))
    raise ValueError(f"unknown representation {name!r}; expected one of {REPRESENTATIONS}")


REPRESENTATIONS = ("WEYL", "SIGMA", "SIGMA_TILDE", "ALPHA_SPINOR", "ALPHA_STANDARD")


def with_sign(rep: RepresentationSet, sign: int) -> RepresentationSet:
    return replace(rep, sign_convention=sign)


def direction_matrix(rep: RepresentationSet, n: Sequence) -> ExactMatrix:
    """Exact ``M . n`` for a direction with rational components."""
    out = zeros(rep.dim)
    for m, c in zip(rep.spatial, n):
        c = ExactScalar.coerce(c)
        if c:
            out = out + m * c
    return out


# -- certificates ----------------------------------------------------------

@dataclass
class IdentityCheck:
    name: str
    passed: bool
    residual: ExactMatrix | None = None

    def to_dict(self) -> dict:
        d = {"identity": self.name, "passed": self.passed}
        if not self.passed and self.residual is not None:
            d["residual"] = self.residual.to_strings()
        return d


@dataclass
class Certificate:
    name: str
    checks: list[IdentityCheck] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]

    def check_zero(self, name: str, residual: ExactMatrix) -> bool:
        ok = residual.is_zero()
        self.checks.append(IdentityCheck(name, ok, residual))
        return ok

    def check_equal(self, name: str, lhs: ExactMatrix, rhs: ExactMatrix) -> bool:
        return self.check_zero(name, lhs - rhs)

    def check(self, name: str, ok: bool) -> bool:
        self.checks.append(IdentityCheck(name, bool(ok)))
        return bool(ok)

    def to_dict(self) -> dict:
        out = {
            "certificate": self.name,
            "passed": self.passed,
            "identities": [c.to_dict() for c in self.checks],
        }
        if self.data:
            out["data"] = self.data
        return out


def verify_pauli_algebra(rep: RepresentationSet) -> Certificate:
    """Hermiticity of each ``M^i`` and ``{M^i, M^j} = 2 delta^ij``, exactly."""
    cert = Certificate(f"pauli_algebra[{rep.name}]")
    one = identity(rep.dim)
    for i, m in enumerate(rep.spatial, 1):
        cert.check_equal(f"M{i} Hermitian", conj_transpose(m), m)
    for i in range(3):
        for j in range(i, 3):
            target = one * 2 if i == j else zeros(rep.dim)
            cert.check_equal(f"{{M{i + 1},M{j + 1}}} = {2 if i == j else 0}",
                             anticommutator(rep.spatial[i], rep.spatial[j]), target)
    return cert


def verify_commutant(rep: RepresentationSet) -> Certificate:
    if not rep.commutant:
        raise ValueError(f"{rep.name} has no commutant to verify")
    names = rep.commutant_names or tuple(f"C{k + 1}" for k in range(len(rep.commutant)))
    cert = Certificate(f"commutant[{rep.name}]")
    for cname, s in zip(names, rep.commutant):
        for i, m in enumerate(rep.spatial, 1):
            cert.check_zero(f"[{cname},M{i}] = 0", commutator(s, m))
    return cert


def verify_kronecker_factorizations() -> Certificate:
    cert = Certificate("kronecker_factorizations")
    for label, explicit, sign, (a, b) in KRON_FACTORIZATIONS:
        cert.check_equal(label, kron(a, b) * sign, explicit)
    return cert


def verify_gamma_matrices() -> Certificate:
    """Clifford relations, ``gamma5 = i g0 g1 g2 g3`` and ``alpha^i = g0 g^i`` for both Dirac representations."""
    cert = Certificate("gamma_matrices")
    metric = (1, -1, -1, -1)
    for which in ("spinor", "standard"):
        g = gamma_matrices(which)
        gs = [g[f"g{m}"] for m in range(4)]
        for mu in range(4):
            for nu in range(mu, 4):
                target = identity(4) * (2 * metric[mu]) if mu == nu else zeros(4)
                cert.check_equal(f"{which}: {{g{mu},g{nu}}} = {2 * metric[mu] if mu == nu else 0}",
                                 anticommutator(gs[mu], gs[nu]), target)
        cert.check_equal(f"{which}: g5 = i g0 g1 g2 g3", I * (gs[0] @ gs[1] @ gs[2] @ gs[3]), g["g5"])
        for mu in range(4):
            cert.check_zero(f"{which}: {{g5,g{mu}}} = 0", anticommutator(g["g5"], gs[mu]))
    return cert


# -- projectors ------------------------------------------------------------

PROJECTORS = ("R", "R_TILDE", "Q_PLUS", "Q_MINUS", "S3_PLUS", "S3_MINUS", "S2_EIGEN_MO")


def projector(name: str) -> ExactMatrix:
    key = name.upper()
    if key == "R":
        return _R
    if key == "R_TILDE":
        return _R_TILDE
    if key in ("Q_PLUS", "Q_MINUS"):
        g5 = gamma_matrices("spinor")["g5"]
        return (_ONE4 + g5) * HALF if key == "Q_PLUS" else (_ONE4 - g5) * HALF
    if key == "S3_PLUS":
        return (_ONE4 + _S[2]) * HALF
    if key == "S3_MINUS":
        return (_ONE4 - _S[2]) * HALF
    if key == "S2_EIGEN_MO":
        return (_ONE4 + _S_TILDE[0]) * HALF
    raise ValueError(f"unknown projector {name!r}; expected one of {PROJECTORS}")


def verify_projectors() -> Certificate:
    cert = Certificate("projectors")
    for name in PROJECTORS:
        p = projector(name)
        cert.check_equal(f"{name}^2 = {name}", p @ p, p)
        cert.check_equal(f"{name} Hermitian", conj_transpose(p), p)
    qp, qm = projector("Q_PLUS"), projector("Q_MINUS")
    cert.check_equal("Q_PLUS + Q_MINUS = 1", qp + qm, _ONE4)
    cert.check_zero("Q_PLUS Q_MINUS = 0", qp @ qm)
    return cert


# -- neutrino sectors ------------------------------------------------------

def neutrino_transform() -> tuple[ExactMatrix, int]:
    """``U' = sigma2 (sigma1 + sigma3)`` and its squared normalization, ``U = U'/sqrt(2)``."""
    return SIGMA2 @ (SIGMA1 + SIGMA3), 2


def verify_neutrino_transform() -> Certificate:
    u, norm_sq = neutrino_transform()
    cert = Certificate("neutrino_transform")
    cert.check_equal("U'^H U' = 2*1", conj_transpose(u) @ u, identity(2) * norm_sq)
    cert.check_equal("U' U'^H = 2*1", u @ conj_transpose(u), identity(2) * norm_sq)
    for label, src, image in (("sigma3", SIGMA3, -SIGMA1), ("sigma2", SIGMA2, -SIGMA2),
                              ("sigma1", SIGMA1, -SIGMA3)):
        cert.check_equal(f"U' {label} U'^H = 2*({_label(image)})",
                         u @ src @ conj_transpose(u), image * norm_sq)
    return cert


def _label(m: ExactMatrix) -> str:
    for sign, prefix in ((1, ""), (-1, "-")):
        for k, s in enumerate(PAULI, 1):
            if m == s * sign:
                return f"{prefix}sigma{k}"
    return repr(m)


def restrict_to_sector(matrices: Sequence[ExactMatrix], basis: ExactMatrix,
                       norm_sq) -> tuple[list[ExactMatrix], list[ExactMatrix]]:
    """Compress each matrix onto the span of ``basis`` columns.

    ``basis`` must satisfy ``basis^H basis = norm_sq * 1``.  Returns the
    compressed matrices ``basis^H M basis / norm_sq`` and the leakage
    ``M basis - basis * compressed`` (zero iff the span is invariant).
    """
    bh = conj_transpose(basis)
    inv = ExactScalar(1) / ExactScalar.coerce(norm_sq)
    reduced, leaks = [], []
    for m in matrices:
        r = bh @ m @ basis * inv
        reduced.append(r)
        leaks.append(m @ basis - basis @ r)
    return reduced, leaks


def _sector_basis(phi: Sequence) -> ExactMatrix:
    """Columns ``kron(e_k, phi)``: the embedding ``xi -> xi (x) phi`` for a constant spinor."""
    a, b = (ExactScalar.coerce(x) for x in phi)
    return ExactMatrix([[a, 0], [b, 0], [0, a], [0, b]])


def verify_mo_neutrino_reduction() -> Certificate:
    cert = Certificate("mo_neutrino_reduction")
    phi = ExactMatrix([[-I], [1]])
    cert.check_equal("sigma2 phi = phi, phi = (-i,1)", SIGMA2 @ phi, phi)
    basis = _sector_basis((-I, 1))
    norm_sq = (conj_transpose(phi) @ phi)[0, 0]
    s2 = projector("S2_EIGEN_MO")
    cert.check_equal("S2_EIGEN_MO fixes the phi-sector", s2 @ basis, basis)
    reduced, leaks = restrict_to_sector(build_rep("SIGMA_TILDE").spatial, basis, norm_sq)
    for k, (leak, red, want) in enumerate(zip(leaks, reduced, (SIGMA3, SIGMA2, SIGMA1)), 1):
        cert.check_zero(f"SigmaTilde{k} preserves the phi-sector", leak)
        cert.check_equal(f"SigmaTilde{k} restricted = {_label(want)}", red, want)
    u, u_norm = neutrino_transform()
    conjugated = [u @ m @ conj_transpose(u) * ExactScalar(Fraction(1, u_norm)) for m in reduced]
    for k, (m, want) in enumerate(zip(conjugated, (-SIGMA1, -SIGMA2, -SIGMA3)), 1):
        cert.check_equal(f"U (restricted {k}) U^H = {_label(want)}", m, want)
    cert.data = {
        "restricted_triple": [_label(m) for m in reduced],
        "conjugated_triple": [_label(m) for m in conjugated],
        "weyl_sign": _weyl_sign(conjugated),
    }
    return cert


def verify_spinor_neutrino_reduction(phi: Sequence = (1, 0)) -> Certificate:
    """Restrict the SIGMA triple to ``xi (x) phi`` for a constant spinor ``phi``.

    The compressed triple is ``-sigma`` for every ``phi``, so with the printed
    evolution ``d/dt Psi = -c Sigma.grad Psi`` the spinor ``xi`` obeys
    ``d/dt xi = +c sigma.grad xi``; ``data['weyl_sign']`` records that sign.
    """
    phi_col = ExactMatrix([[phi[0]], [phi[1]]])
    norm_sq = (conj_transpose(phi_col) @ phi_col)[0, 0]
    cert = Certificate(f"spinor_neutrino_reduction[phi=({phi[0]},{phi[1]})]")
    basis = _sector_basis(phi)
    reduced, leaks = restrict_to_sector(build_rep("SIGMA").spatial, basis, norm_sq)
    for k, (leak, red) in enumerate(zip(leaks, reduced), 1):
        cert.check_zero(f"Sigma{k} preserves the phi-sector", leak)
        cert.check_equal(f"Sigma{k} restricted = -sigma{k}", red, -PAULI[k - 1])
    # the S^3 projector passes phi's upper component only
    p = projector("S3_PLUS")
    e_up = _sector_basis((1, 0))
    cert.check_equal("S3_PLUS (xi (x) phi) = phi_0 (xi (x) e0)", p @ basis,
                     e_up * ExactScalar.coerce(phi[0]))
    cert.data = {"restricted_triple": [_label(m) for m in reduced], "weyl_sign": _weyl_sign(reduced)}
    return cert


def _weyl_sign(triple: Sequence[ExactMatrix]) -> int | None:
    if all(m == s for m, s in zip(triple, PAULI)):
        return 1
    if all(m == -s for m, s in zip(triple, PAULI)):
        return -1
    return None


def algebra_certificates(overrides: dict[str, RepresentationSet] | None = None) -> list[Certificate]:
    """Every algebraic certificate, in report order.

    ``overrides`` replaces named representations (fault injection in tests
    and the CLI's test mode).
    """
    overrides = overrides or {}
    certs = []
    for name in REPRESENTATIONS:
        rep = overrides.get(name) or build_rep(name)
        certs.append(verify_pauli_algebra(rep))
        if rep.commutant:
            certs.append(verify_commutant(rep))
    certs += [
        verify_kronecker_factorizations(),
        verify_gamma_matrices(),
        verify_projectors(),
        verify_neutrino_transform(),
        verify_mo_neutrino_reduction(),
        verify_spinor_neutrino_reduction(),
    ]
    return certs
