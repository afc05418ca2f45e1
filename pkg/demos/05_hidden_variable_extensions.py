"""Continuous hidden variables attached to the basis vectors.

Both extensions multiply the quantum angular factor by one global constant.
The first one involves a delta-correlated inner product, regularized here by
a narrow normal kernel; as its width shrinks the constant approaches
rho_S(lambda_S) rho_M(lambda_M) / sqrt(N).
"""

import numpy as np

from chshlab import PeakedDensity, RegularizedDelta, qm_correlation
from chshlab.extensions import kappa_sm, model1_correlation, model1_prefactor, model3_correlation, model3_prefactor

rho_S, rho_M = PeakedDensity(0.0, 0.1), PeakedDensity(0.0, 0.1)
kappa = kappa_sm(rho_S, rho_M)
print(f"kappa_SM = {kappa:.10f}\n")

print("     eps        prefactor / kappa - 1   error estimate")
for eps in (1e-2, 3e-3, 1e-3, 3e-4, 1e-4):
    pre = model1_prefactor(rho_S, rho_M, RegularizedDelta(eps))
    print(f"  {eps:.0e}        {pre.value / kappa - 1:+.3e}          {pre.error:.1e}")

rng = np.random.default_rng(3)
a, b = rng.standard_normal((2, 3))
eps = RegularizedDelta(1e-3)
print("\nat one random pair of settings:")
print(f"  quantum         {qm_correlation('PsiPlus', a, b):+.8f}")
print(f"  model 1 / kappa {model1_correlation('PsiPlus', a, b, rho_S, rho_M, eps) / kappa:+.8f}")

rho_A, rho_B = PeakedDensity(0.2, 0.05), PeakedDensity(-0.3, 0.15)
pre = model3_prefactor(rho_A, rho_B).value
print(f"  model 3 / const {model3_correlation('PsiPlus', a, b, rho_A, rho_B) / pre:+.8f}")
