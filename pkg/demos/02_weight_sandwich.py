"""
The weight sandwich in the group case
=====================================

For Z = SL(2,R) x SL(2,R) / diag the spherical representation delta x dual
gives the weight w(g z0) = |g u_H|.  On an open chamber it is comparable to
a^lambda for the highest weight lambda; the constants are C1 = 1/sqrt 2 and
C2 = 1, so the ratio is sqrt 2.
"""
import numpy as np

from spherodeck import load_space
from spherodeck.errors import ToleranceViolation
from spherodeck.sphericity import certify
from spherodeck.weights import SphericalRep, rep_weight, verify_sandwich

sp = load_space("group_sl2")
U = SphericalRep.from_space(sp, 0)
print("fixed vector residual", U.fixed_residual())

# on (diag(e^t, e^-t), 1) the weight is |g|_F / sqrt 2 = sqrt(cosh 2t)
for t in (0.0, 0.5, 1.0, 2.0):
    g = np.diag([np.exp(t), np.exp(-t), 1.0, 1.0])
    print(f"t={t}: w = {rep_weight(U, g):.6f}   sqrt(cosh 2t) = {np.sqrt(np.cosh(2 * t)):.6f}")

labels = certify(sp.name, sp.rs, sp.h, sp.cd).open_chambers
chamber = [c for c in sp.rs.chambers if c.label in labels][0]
c1, c2 = verify_sandwich(U, chamber)
print(f"C1 = {c1:.6f}  C2 = {c2:.6f}  ratio = {c2 / c1:.6f}")

# shifting lambda by a simple root breaks the comparison, and the check says so
alpha = sp.rs.roots[sp.rs.simple[0]].functional
try:
    verify_sandwich(U, chamber, lam=U.highest_weight(chamber)[0] + alpha)
except ToleranceViolation as exc:
    print("negative control:", exc)
