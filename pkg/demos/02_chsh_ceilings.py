"""How large can S get?

The quantum and vector-space models reach 2 sqrt(2) for every Bell state;
a deterministic local model built from sign(a . lambda) stops at 2.
"""

import numpy as np

from chshlab import BellState, GudderModel, QuantumModel, chsh_exact, maximize_chsh, sign_model
from chshlab.lhv import standard_settings

print("diagonal of the correlation tensor E(e_i, e_j) (off-diagonal entries vanish):")
for s in BellState:
    print(f"  {s.value:<8}", GudderModel(s).correlation_tensor().diagonal())

print("\noptimized |S|:")
for s in BellState:
    q, g = maximize_chsh(QuantumModel(s)), maximize_chsh(GudderModel(s))
    print(f"  {s.value:<8} quantum {q.S:.9f}   vector model {g.S:.9f}")
print(f"  2 sqrt 2 = {2 * np.sqrt(2):.9f}")

opt = maximize_chsh(sign_model())
print(f"\nsign model optimum: {opt.S:.9f}  (grid stage {opt.grid_S:.9f})")

q = standard_settings()
print("\nat a = 0, a' = 90, b = 45, b' = -45 degrees in the x-z plane:")
for model in (QuantumModel("PsiMinus"), sign_model()):
    r = chsh_exact(model, q)
    print(f"  {model.name:<18} E = {np.round(r.terms, 4)}  S = {r.S:+.6f}")
