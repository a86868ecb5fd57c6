"""
Open parabolics and chamber coverage on the triple space
========================================================

SL(2,R)^3 / diag SL(2,R) is spherical for every choice of split torus, but
whether K (closed chambers) z0 covers the space depends on the torus.  We
compare the generic torus (three distinct directions) with A0 x A0 x B0.
"""
import numpy as np

from spherodeck import load_space
from spherodeck.decomp import coverage_check
from spherodeck.root_system import chamber_of, standard_parabolic
from spherodeck.sphericity import certify, test_open

# certify both tori: every minimal parabolic gets the rank test p + h = g
for name in ("triple_sl2_generic", "triple_sl2_degenerate"):
    sp = load_space(name)
    cert = certify(name, sp.rs, sp.h, sp.cd)
    print(f"{name}: spherical={cert.is_spherical} pure={cert.is_pure} "
          f"open chambers {len(cert.open_chambers)} of {len(sp.rs.chambers)}")

# on the degenerate torus, the parabolic P0 x opposite P0 x Q0 is open and
# P0 x P0 x Q0 is not: the first two factors then share a Borel with h
sp = load_space("triple_sl2_degenerate")
for x in ([1.0, -1.0, 1.0], [1.0, 1.0, 1.0]):
    par = standard_parabolic(sp.rs, (), chamber_of(sp.rs, np.array(x))[0])
    ok, (dsum, dcap) = test_open(par, sp.h)
    print(f"  chamber of {x}: open={ok}  dim(p+h)={dsum}  dim(p cap h)={dcap}")

# coverage: decompose seeded samples g = k exp(X) h and ask whether X lies in
# the closure of an open chamber
for name in ("triple_sl2_generic", "triple_sl2_degenerate"):
    cov = coverage_check(load_space(name), samples=300, seed=7)
    print(f"{name}: coverage {cov.coverage:.3f}, solver failures {cov.solver_failures}, "
          f"worst relative residual {cov.max_residual:.1e}")
