"""
Three matrix equations, one set of Maxwell equations
====================================================

Every identity below is decided in exact Gaussian-rational arithmetic, so a
"pass" means equality, not agreement to a tolerance.
"""
from zeromass.field_maps import AS_PRINTED, DEFAULT_CONVENTIONS, packing
from zeromass.pdes import CLAIMS, constraint_claims, convention_search, expand, sk_sign_search
from zeromass.representations import algebra_certificates, build_rep

# Every representation obeys {M^i, M^j} = 2 delta^ij and has its commutant.
certs = algebra_certificates()
for cert in certs:
    print(f"{cert.name:45s} {len(cert.checks):3d} identities  {'ok' if cert.passed else 'FAILED'}")

# Expanding SIGMA_TILDE acting on (0, F) gives eight real first-order equations.
system = expand(build_rep("SIGMA_TILDE"), packing("MO"))
print("\nSIGMA_TILDE x MO, expanded:")
print(system.pretty())

# Each equivalence claim is tried under the documented sign conventions.
# The Riemann-Silberstein packings need F = E - icB with the evolution
# sign as written; the SK packing works unchanged.
print(f"\nprinted convention: {AS_PRINTED.describe()}")
for claim in CLAIMS:
    search = convention_search(claim)
    w = search.winner
    conv = "" if w.convention is None else w.convention.describe()
    printed = "holds" if search.as_printed.verdict.equal else "fails"
    print(f"{claim.name:60s} printed: {printed:5s} confirmed with: {conv or 'no convention needed'}")

print("\ndefault conventions:", {k: v.describe() for k, v in DEFAULT_CONVENTIONS.items()})

# Only the all-plus and all-minus sign patterns on the SK coefficients work.
print("SK sign patterns giving Maxwell:", sk_sign_search()["passing_sign_patterns"])

# The complementary projector leaves exactly the two divergence constraints.
for name, v in constraint_claims().items():
    print(f"{name}: constraint subsystem = divergences? {v['equal_to_divergences']}")
