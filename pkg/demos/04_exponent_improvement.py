"""
The half-step exponent improvement and the ODE lemma
====================================================

Starting from an a priori bound a^delta, each axis is improved by half
steps while delta_j - 1 > Lambda_j, then set to Lambda_j at the cost of d_F
logarithmic powers.  The mechanism behind one step is a linear ODE
f' = A f + g in the radial variable.
"""
import numpy as np

from spherodeck.exponents import halving_count, improve_exponent, ode_envelope_check

# rank one, delta = 1.3, Lambda = -1: three halvings
res = improve_exponent([1.3], [-1.0], 0, [1])
for step in res.trace:
    print(f"axis {step.axis}: {step.action:8s} {step.before:+.2f} -> {step.after:+.2f}   d = {step.d}")

# rank two: the count per axis is ceil(2 (delta_j - 1 - Lambda_j))
res = improve_exponent([5.0, -3.0], [0.0, -3.0], 0, [1, 2])
print("halvings", [res.halvings(j) for j in range(2)], "formula",
      [halving_count(5.0, 0.0), halving_count(-3.0, -3.0)], "final d", res.d)

# the ODE lemma: |f(t)| <= C (1+t)^p e^{max(mu, nu) t}
rep = ode_envelope_check([[-1.0]], -2.0, [1.0], lambda t: [1.0])
print(f"A=[-1], nu=-2: C = {rep.C_fit:.6f}  (bound 2), violated {rep.violated}")

rep = ode_envelope_check([[0.0, 1.0], [0.0, 0.0]], -1.0, [0.0, 1.0])
print(f"Jordan block: p = {rep.p}, C = {rep.C_fit:.6f}, violated {rep.violated}")

gen = np.random.default_rng(0)
bad = 0
for _ in range(20):
    n = int(gen.integers(1, 5))
    A = gen.uniform(-2, 2, size=(n, n))
    f0 = gen.normal(size=n)
    f0 /= 2 * np.linalg.norm(f0)
    u = gen.normal(size=n)
    bad += ode_envelope_check(A, float(gen.uniform(-2, 1)), f0, lambda t: np.cos(t) * u + 0.3).violated
print(f"random systems violated: {bad} of 20")
