"""A probability measure on a real four-dimensional space.

A qubit pure state with Bloch vector n is represented by (1, n) in V4.  The
linear form f(v) = k . v with k = (1, n_phi) / 2 assigns it the same number
the Born rule gives, Tr(P_phi P_psi).
"""

import numpy as np

from chshlab import ReferenceMeasure, born_probability, measure
from chshlab.gudder import GudderForm, check_orthogonal_additivity

rng = np.random.default_rng(0)
phi = np.array([0.0, 0.0, 1.0])
m = ReferenceMeasure(phi)
print("form coefficients k:", m.form.k)

print("\n theta   f_phi(psi)   Tr(P_phi P_psi)")
for deg in (0, 30, 60, 90, 120, 180):
    t = np.deg2rad(deg)
    psi = np.array([np.sin(t), 0.0, np.cos(t)])
    print(f"{deg:6d}   {measure(m, psi):.10f}   {born_probability(phi, psi):.10f}")

# random directions: largest disagreement between the two routes
v = rng.standard_normal((2000, 3))
v /= np.linalg.norm(v, axis=1, keepdims=True)
worst = max(abs(measure(ReferenceMeasure(p), q) - born_probability(p, q)) for p, q in zip(v[:1000], v[1000:]))
print(f"\nmax |f - Born| over 1000 random pairs: {worst:.1e}")

# additivity on orthogonal pairs holds for c (v.v) + k.v, fails for v0^2 + v1
print("reference form additive:", bool(check_orthogonal_additivity(m.form, trials=2000)))
print("with c = 0.3:           ", bool(check_orthogonal_additivity(GudderForm(0.3, m.form.k), trials=2000)))
probe = check_orthogonal_additivity(lambda w: w.components[0] ** 2 + w.components[1], trials=2000)
print(f"v0^2 + v1:               {bool(probe)} (worst residual ratio {probe.max_violation:.2f})")
