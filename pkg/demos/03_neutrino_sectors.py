"""
Neutrinos inside the Maxwell equation
=====================================

The same 4-component equations that carry Maxwell fields also carry
2-component Weyl spinors: embed xi as xi (x) phi and the dynamics closes on
that sector.
"""
from zeromass.harness import run_neutrino_consistency
from zeromass.representations import verify_mo_neutrino_reduction, verify_spinor_neutrino_reduction
from zeromass.solver import GridSpec, SpinorField

# Exact statement first: restricting SIGMA to xi (x) phi leaves -sigma.
a = verify_spinor_neutrino_reduction((1, 0))
print("SIGMA restricted:", a.data["restricted_triple"], "-> Weyl sign", a.data["weyl_sign"])

# SIGMA_TILDE restricted to xi (x) (-i, 1) gives (sigma3, sigma2, sigma1);
# rotating by U turns it into -sigma.
b = verify_mo_neutrino_reduction()
print("SIGMA_TILDE restricted:", b.data["restricted_triple"], "after U:", b.data["conjugated_triple"])

# Now the dynamics on a grid.
grid = GridSpec(n=24, steps=40)
report = run_neutrino_consistency(grid, seed=5, band=3)
for check in report.checks:
    print(f"{'ok  ' if check.passed else 'FAIL'} {check.name}: {check.value:.2e}")

# A zero spinor is a (trivial) solution in every sector.
quiet = run_neutrino_consistency(grid, 5, xi=SpinorField.zeros(grid, 2))
print("zero data, largest check value:", max(c.value for c in quiet.checks))
