"""Mixing a Bell vector with the completely random vector e0 (x) e0.

The correlation scales with the mixing weight, so the optimized S is the
weight times 2 sqrt(2) and the local bound is crossed at 1 / sqrt(2).
"""

import numpy as np

from chshlab import WernerModel, maximize_chsh, model2_chsh_threshold

print(" lambda    max |S|   lambda * 2 sqrt 2")
for lam in np.linspace(0.0, 1.0, 11):
    s = maximize_chsh(WernerModel(lam), restarts=2).S
    print(f"  {lam:.1f}   {s:.6f}   {lam * 2 * np.sqrt(2):.6f}")

lam_c = model2_chsh_threshold()
print(f"\nbisection threshold: {lam_c:.5f}   1/sqrt(2) = {1 / np.sqrt(2):.5f}")
