"""Orthogonally additive measures on V4 and the tensor-product correlation model.

A continuous orthogonally additive functional on V4 has the form
``f(v) = c (v . v) + k . v``.  The reference measure for a state with Bloch
vector ``n_phi`` uses ``c = 0`` and ``k = (1, n_phi) / 2``; it reproduces the
Born rule on pure qubit states.  On V4 (x) V4 the correlation of the
observables ``(0, a)`` and ``(0, b)`` in a Bell vector is their inner product,
rescaled by two so it lines up with the quantum expectation value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .algebra import (
    BellState,
    Direction,
    DirectionLike,
    FourVector,
    bell_vector,
    inner4,
    inner16,
    observable_vector,
    state_vector,
    tensor,
    unit_vector,
)
from .models import OUTCOMES, BilinearModel

__all__ = [
    "GudderForm",
    "ReferenceMeasure",
    "AdditivityReport",
    "measure",
    "check_orthogonal_additivity",
    "random_orthogonal_pair",
    "gudder_correlation",
    "gudder_joint_probability",
    "GudderModel",
]

#: Factor restoring unit normalization of the Bell-vector inner products.
ABSORBED_FACTOR = 2.0


@dataclass(frozen=True)
class GudderForm:
    """``f(v) = c (v . v) + k . v``."""

    c: float
    k: FourVector

    def __call__(self, v: FourVector) -> float:
        linear = inner4(self.k, v)
        return linear if self.c == 0 else self.c * inner4(v, v) + linear


class ReferenceMeasure:
    """The probability measure ``f_phi`` attached to the reference state ``phi``."""

    def __init__(self, phi: DirectionLike):
        self.n_phi = unit_vector(phi)
        self.form = GudderForm(0.0, 0.5 * state_vector(self.n_phi))

    @property
    def phi(self) -> Direction:
        return Direction.from_vector(self.n_phi)

    @property
    def v_phi(self) -> FourVector:
        return state_vector(self.n_phi)

    def __call__(self, v: FourVector) -> float:
        return self.form(v)


def measure(m: ReferenceMeasure, psi: DirectionLike) -> float:
    """Probability assigned by ``m`` to the state vector ``(1, n_psi)``."""
    return m(state_vector(psi))


@dataclass
class AdditivityReport:
    passed: bool
    trials: int
    max_violation: float
    worst_pair: Optional[tuple] = None

    def __bool__(self):
        return self.passed


def random_orthogonal_pair(rng: np.random.Generator) -> tuple[FourVector, FourVector]:
    """``v`` uniform on the unit sphere of V4 and ``w`` Gram-Schmidt'ed against it.

    ``w`` carries a random length so that quadratic terms are exercised.
    """
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    w = rng.standard_normal(4)
    w -= np.dot(w, v) * v
    w *= rng.uniform(0.1, 3.0) / np.linalg.norm(w)
    return FourVector(v), FourVector(w)


def check_orthogonal_additivity(
    f: Union[GudderForm, Callable[[FourVector], float]], trials: int = 1000, seed: int = 0
) -> AdditivityReport:
    """Test ``f(v + w) = f(v) + f(w)`` on random orthogonal pairs.

    The pass threshold for a pair is ``1e-10 * (1 + |f(v)| + |f(w)|)``; the
    reported ``max_violation`` is the largest ratio of residual to threshold
    scale, and ``worst_pair`` the offending ``(v, w)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst, worst_pair, passed = 0.0, None, True
    for _ in range(trials):
        v, w = random_orthogonal_pair(rng)
        fv, fw = f(v), f(w)
        resid = abs(f(v + w) - fv - fw)
        scale = 1.0 + abs(fv) + abs(fw)
        if resid / scale > worst:
            worst, worst_pair = resid / scale, (v, w)
        if resid >= 1e-10 * scale:
            passed = False
    return AdditivityReport(passed, trials, worst, worst_pair)


def gudder_correlation(state, a: DirectionLike, b: DirectionLike, phi_ab=None) -> float:
    """Rescaled inner product ``2 <A (x) B, phi_AB>``.

    ``phi_ab`` overrides the Bell vector for ``state`` (any BipartiteVector).
    """
    if phi_ab is None:
        phi_ab = bell_vector(state)
    obs = tensor(observable_vector("A", a), observable_vector("B", b))
    return ABSORBED_FACTOR * inner16(obs, phi_ab)


def gudder_joint_probability(state, a: DirectionLike, b: DirectionLike, alpha: int, beta: int) -> float:
    """``<(1, alpha a) (x) (1, beta b), phi_AB> / 4`` with the absorbed factor,
    which equals ``[1 + alpha beta E] / 4``."""
    if alpha not in OUTCOMES or beta not in OUTCOMES:
        raise ValueError(f"outcomes must be +1 or -1, got {alpha}, {beta}")
    va = state_vector(unit_vector(a), alpha)
    vb = state_vector(unit_vector(b), beta)
    return 0.25 * ABSORBED_FACTOR * inner16(tensor(va, vb), bell_vector(state))


class GudderModel(BilinearModel):
    def __init__(self, state=BellState.PsiMinus):
        self.state = BellState.parse(state)
        self.name = f"gudder/{self.state.value}"

    def correlation(self, a, b):
        return gudder_correlation(self.state, a, b)

    def joint_probabilities(self, a, b):
        return np.array(
            [[gudder_joint_probability(self.state, a, b, al, be) for be in OUTCOMES] for al in OUTCOMES]
        )
