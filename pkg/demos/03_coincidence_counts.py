"""A simulated Bell experiment.

Outcome pairs are drawn at each of the four setting pairs, correlations are
assembled from the coincidence counts and S_exp is compared with the exact
value.  The standard error shrinks like 1/sqrt(n).
"""

import numpy as np

from chshlab import QuantumModel, chsh_exact, chsh_from_counts, maximize_chsh, simulate_events

model = QuantumModel("PsiMinus")
q = maximize_chsh(model).settings
exact = chsh_exact(model, q).S
deg = np.round(q.degrees(), 2).reshape(4, 2)
for name, (t, p) in zip(("a", "a'", "b", "b'"), deg):
    print(f"{name:<2} theta = {t:7.2f}  phi = {p:7.2f}")
print(f"exact S = {exact:+.6f}\n")

print("      n      S_exp      stderr   |S_exp - S| / stderr")
for n in (100, 1_000, 10_000, 100_000, 1_000_000):
    r = chsh_from_counts(simulate_events(model, q, n, seed=1))
    print(f"{n:>8} {r.S:+.6f}  {r.stderr:.2e}   {abs(r.S - exact) / r.stderr:.2f}")

c = simulate_events(model, q, 10_000, seed=1)
print("\ncounts at (a, b), outcomes ++ +- -+ --:", c.counts[0].ravel())
same = simulate_events(model, q, 10_000, seed=1, workers=4)
print("identical with 4 worker threads:", bool(np.array_equal(c.counts, same.counts)))
