"""Hidden-variable extensions of the tensor-product correlation model.

Model 1
    Continuous orthonormal basis ``e_mu(lambda)`` with a source density
    ``rho_S`` and device density ``rho_M``.  The inner product of basis
    vectors carries ``delta(lambda - lambda')``, which is regularized here by a
    narrow normal kernel.  The correlation equals
    ``rho_S(lambda_A) rho_M(lambda_A) / sqrt(N)`` times the angular factor of
    the Bell state, with ``N = 4 * int rho_S^2``.
Model 2
    Werner-type mixture ``lambda_mix * phi + (1 - lambda_mix) * e_0 (x) e_0``;
    the correlation scales linearly with ``lambda_mix``.
Model 3
    Basis vectors smeared independently on each side with ``rho_A``,
    ``rho_B``.  The correlation equals
    ``rho_A(lambda_A) rho_B(lambda_B) / sqrt(N_A N_B)`` times the angular
    factor.

In every case the global constant can be absorbed into the observables; the
model classes below do so, the ``*_correlation`` functions do not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import (
    BellState,
    BipartiteVector,
    Direction,
    FourVector,
    bell_vector,
    inner16,
    observable_vector,
    tensor,
)
from .gudder import ABSORBED_FACTOR, gudder_correlation
from .models import BilinearModel
from .quadrature import QuadResult, adaptive_gauss

__all__ = [
    "PeakedDensity",
    "RegularizedDelta",
    "WernerState",
    "source_angular_factor",
    "model1_prefactor",
    "model1_correlation",
    "model2_correlation",
    "model2_chsh_threshold",
    "model3_prefactor",
    "model3_correlation",
    "kappa_sm",
    "ContinuousBasisModel",
    "WernerModel",
    "IndependentSourceModel",
]

WINDOW = 8.0
QUAD_ATOL = 1e-10

Z = Direction(0.0, 0.0)


@dataclass(frozen=True)
class PeakedDensity:
    """Normal density centred at ``mu`` with width ``sigma``."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")

    def __call__(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * np.sqrt(2 * np.pi))

    @property
    def window(self) -> tuple[float, float]:
        return self.mu - WINDOW * self.sigma, self.mu + WINDOW * self.sigma

    def integral(self, order: int = 10) -> QuadResult:
        return adaptive_gauss(self, *self.window, atol=QUAD_ATOL, order=order)

    def square_integral(self, order: int = 10) -> QuadResult:
        return adaptive_gauss(lambda x: self(x) ** 2, *self.window, atol=QUAD_ATOL, order=order)

    def second_derivative(self, x: float) -> float:
        h = 1e-3 * self.sigma
        return float((self(x + h) - 2 * self(x) + self(x - h)) / (h * h))


@dataclass(frozen=True)
class RegularizedDelta:
    """delta(x) replaced by a normal kernel of width ``epsilon``."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    @property
    def kernel(self) -> PeakedDensity:
        return PeakedDensity(0.0, self.epsilon)

    def __call__(self, x):
        return self.kernel(x)

    def integral(self, order: int = 10) -> QuadResult:
        return self.kernel.integral(order)


@dataclass(frozen=True)
class WernerState:
    lambda_mix: float
    base: BellState = BellState.PhiPlus

    def __post_init__(self):
        if not 0.0 <= self.lambda_mix <= 1.0:
            raise ValueError(f"lambda_mix must lie in [0, 1], got {self.lambda_mix}")
        object.__setattr__(self, "base", BellState.parse(self.base))

    def vector(self) -> BipartiteVector:
        random_part = tensor(FourVector.basis(0), FourVector.basis(0))
        return self.lambda_mix * bell_vector(self.base) + (1.0 - self.lambda_mix) * random_part


def source_angular_factor(state, a, b) -> float:
    """``<A (x) B, C>`` with ``C`` the unit-coefficient diagonal of the Bell state.

    This is the bracket multiplying the density prefactor in models 1 and 3,
    e.g. ``a1 b1 - a2 b2 + a3 b3`` for PhiPlus.
    """
    signs = BipartiteVector(2.0 * bell_vector(state).c)
    return inner16(tensor(observable_vector("A", a), observable_vector("B", b)), signs)


def _smeared_overlap(rho: PeakedDensity, delta: RegularizedDelta, at: float, order: int) -> QuadResult:
    """``int delta(at - lambda) rho(lambda) d lambda`` over the kernel window."""
    lo, hi = at - WINDOW * delta.epsilon, at + WINDOW * delta.epsilon
    res = adaptive_gauss(lambda x: delta(at - x) * rho(x), lo, hi, atol=QUAD_ATOL, order=order)
    # leading regularization bias: eps^2 / 2 * rho''
    bias = 0.5 * delta.epsilon**2 * abs(rho.second_derivative(at))
    return QuadResult(res.value, res.error + bias)


def model1_prefactor(
    rho_S: PeakedDensity,
    rho_M: PeakedDensity,
    eps: RegularizedDelta,
    lambda_A: Optional[float] = None,
    order: int = 10,
) -> QuadResult:
    """``rho_S(lambda_A) / sqrt(N) * int delta(lambda_A - lambda_B) rho_M(lambda_B) d lambda_B``.

    ``lambda_A`` defaults to the centre of ``rho_M``.  The error estimate
    adds the quadrature error and the leading regularization bias.
    """
    if lambda_A is None:
        lambda_A = rho_M.mu
    n_sq = rho_S.square_integral(order)
    norm = 4.0 * n_sq.value
    overlap = _smeared_overlap(rho_M, eps, lambda_A, order)
    scale = float(rho_S(lambda_A)) / np.sqrt(norm)
    value = scale * overlap.value
    error = scale * overlap.error + abs(value) * 0.5 * 4.0 * n_sq.error / norm
    return QuadResult(value, error)


def kappa_sm(rho_S: PeakedDensity, rho_M: PeakedDensity) -> float:
    """``rho_S(lambda_S) rho_M(lambda_M) / sqrt(N)``, ``N`` by quadrature."""
    norm = 4.0 * rho_S.square_integral().value
    return float(rho_S(rho_S.mu) * rho_M(rho_M.mu)) / np.sqrt(norm)


def model1_correlation(
    state,
    a,
    b,
    rho_S: PeakedDensity,
    rho_M: PeakedDensity,
    eps: RegularizedDelta,
    lambda_A: Optional[float] = None,
    order: int = 10,
) -> float:
    pre = model1_prefactor(rho_S, rho_M, eps, lambda_A, order)
    return pre.value * source_angular_factor(state, a, b)


def model2_correlation(w: WernerState, a, b) -> float:
    return gudder_correlation(w.base, a, b, phi_ab=w.vector())


def _default_eps(*rhos: PeakedDensity) -> RegularizedDelta:
    return RegularizedDelta(1e-4 * min(r.sigma for r in rhos))


def model3_prefactor(
    rho_A: PeakedDensity,
    rho_B: PeakedDensity,
    eps: Optional[RegularizedDelta] = None,
    lambda_A: Optional[float] = None,
    lambda_B: Optional[float] = None,
    order: int = 10,
) -> QuadResult:
    """``rho_A(lambda_A) rho_B(lambda_B) / sqrt(N_A N_B)`` evaluated by quadrature.

    Each side is the overlap of the device basis vector at ``lambda_k`` with
    the smeared source vector, ``int delta(lambda_k - l) rho_k(l) dl /
    sqrt(N_k)``, ``N_k = int rho_k^2``.
    """
    eps = eps or _default_eps(rho_A, rho_B)
    lambda_A = rho_A.mu if lambda_A is None else lambda_A
    lambda_B = rho_B.mu if lambda_B is None else lambda_B
    sides = []
    for rho, lam in ((rho_A, lambda_A), (rho_B, lambda_B)):
        nk = rho.square_integral(order)
        ov = _smeared_overlap(rho, eps, lam, order)
        v = ov.value / np.sqrt(nk.value)
        e = ov.error / np.sqrt(nk.value) + abs(v) * 0.5 * nk.error / nk.value
        sides.append((v, e))
    (va, ea), (vb, eb) = sides
    return QuadResult(va * vb, abs(va) * eb + abs(vb) * ea)


def model3_correlation(
    state,
    a,
    b,
    rho_A: PeakedDensity,
    rho_B: PeakedDensity,
    eps: Optional[RegularizedDelta] = None,
    lambda_A: Optional[float] = None,
    lambda_B: Optional[float] = None,
    order: int = 10,
) -> float:
    """Prefactor times the Bell-vector inner product, with the factor 1/2 absorbed."""
    pre = model3_prefactor(rho_A, rho_B, eps, lambda_A, lambda_B, order)
    return pre.value * ABSORBED_FACTOR * inner16(
        tensor(observable_vector("A", a), observable_vector("B", b)), bell_vector(state)
    )


class WernerModel(BilinearModel):
    def __init__(self, lambda_mix: float, base=BellState.PhiPlus):
        self.werner = WernerState(lambda_mix, base)
        self.name = f"werner/{self.werner.base.value}"

    @property
    def lambda_mix(self) -> float:
        return self.werner.lambda_mix

    def correlation(self, a, b):
        return model2_correlation(self.werner, a, b)


class _PrefactorModel(BilinearModel):
    """Correlation ``raw(a, b) / raw_PhiPlus(z, z)``; the constant is kept in ``constant``."""

    constant: QuadResult
    state: BellState

    def raw_correlation(self, a, b) -> float:
        raise NotImplementedError

    def correlation(self, a, b):
        return self.raw_correlation(a, b) / self.reference

    @property
    def reference(self) -> float:
        return self.constant.value * source_angular_factor(BellState.PhiPlus, Z, Z)


class ContinuousBasisModel(_PrefactorModel):
    """Model 1 with its global constant absorbed."""

    def __init__(self, state, rho_S: PeakedDensity, rho_M: PeakedDensity, eps: RegularizedDelta, lambda_A=None):
        self.state = BellState.parse(state)
        self.rho_S, self.rho_M, self.eps = rho_S, rho_M, eps
        self.lambda_A = rho_M.mu if lambda_A is None else lambda_A
        self.constant = model1_prefactor(rho_S, rho_M, eps, self.lambda_A)
        self.name = f"model1/{self.state.value}"

    def raw_correlation(self, a, b):
        return self.constant.value * source_angular_factor(self.state, a, b)


class IndependentSourceModel(_PrefactorModel):
    """Model 3 with its global constant absorbed."""

    def __init__(self, state, rho_A: PeakedDensity, rho_B: PeakedDensity, eps=None, lambda_A=None, lambda_B=None):
        self.state = BellState.parse(state)
        self.rho_A, self.rho_B = rho_A, rho_B
        self.constant = model3_prefactor(rho_A, rho_B, eps, lambda_A, lambda_B)
        self.name = f"model3/{self.state.value}"

    def raw_correlation(self, a, b):
        return self.constant.value * ABSORBED_FACTOR * inner16(
            tensor(observable_vector("A", a), observable_vector("B", b)), bell_vector(self.state)
        )


def model2_chsh_threshold(base=BellState.PhiPlus, tol: float = 1e-4, restarts: int = 2) -> float:
    """Smallest ``lambda_mix`` with ``max |S| >= 2``, by bisection on [0, 1]."""
    from .chsh import maximize_chsh

    def excess(lam):
        return maximize_chsh(WernerModel(lam, base), restarts=restarts).S - 2.0

    lo, hi = 0.0, 1.0
    if excess(hi) < 0:
        raise ValueError(f"{base} never violates the bound")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
