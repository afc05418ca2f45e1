"""Factorizable local hidden-variable models.

Two families are provided:

* continuous or finite hidden-variable spaces with deterministic responses
  (:class:`DeterministicStrategy`) or factorized conditional probabilities
  (:class:`FactorizedModel`), evaluated by Monte Carlo or, for finite spaces,
  exactly;
* :class:`FiniteStrategy`, a table of responses for a fixed settings quad over
  a finite weighted hidden-variable set, used for exact CHSH bound checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .algebra import DirectionLike, unit_vector
from .models import OUTCOMES, CorrelationModel, SettingsQuad
from .streams import blocks, keyed_stream

__all__ = [
    "Estimate",
    "LambdaSpace",
    "DeterministicStrategy",
    "FactorizedModel",
    "FiniteStrategy",
    "lhv_correlation",
    "sign_model",
    "sign_model_correlation",
    "chsh_function",
    "random_deterministic_strategy",
    "random_factorized_strategy",
    "exact_chsh_finite",
    "standard_settings",
]

WEIGHT_TOL = 1e-12

#: Stream-key tag for Monte Carlo hidden-variable draws.
_LHV_STREAM = 0x4C48


class Estimate(NamedTuple):
    value: float
    stderr: float


def _sphere_sampler(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal((n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class LambdaSpace:
    """Hidden-variable domain.

    ``sampler(rng, n)`` draws ``n`` values distributed as ``rho``.  A finite
    space also carries ``support`` (first axis indexes points) and ``weights``.
    ``density`` and ``volume`` are optional and only used by
    :meth:`normalization`.
    """

    sampler: Callable[[np.random.Generator, int], np.ndarray]
    support: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    volume: Optional[float] = None
    uniform_sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None
    description: str = ""

    @property
    def finite(self) -> bool:
        return self.support is not None

    @classmethod
    def sphere(cls) -> "LambdaSpace":
        return cls(
            sampler=_sphere_sampler,
            density=lambda lam: np.full(len(lam), 1.0 / (4 * np.pi)),
            volume=4 * np.pi,
            uniform_sampler=_sphere_sampler,
            description="unit sphere, uniform",
        )

    @classmethod
    def discrete(cls, support, weights) -> "LambdaSpace":
        support = np.asarray(support, dtype=float)
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) != len(support):
            raise ValueError("weights must be 1-d and match the support length")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        cdf = np.cumsum(w)

        def sampler(rng, n):
            idx = np.minimum(np.searchsorted(cdf, rng.random(n) * cdf[-1], side="right"), len(w) - 1)
            return support[idx]

        return cls(sampler=sampler, support=support, weights=w, description=f"{len(w)} points")

    def normalization(self, samples: int = 100_000, seed: int = 0) -> Estimate:
        """Integral of the density (exact for finite spaces, else Monte Carlo)."""
        if self.finite:
            return Estimate(float(np.sum(self.weights)), 0.0)
        if self.density is None or self.volume is None or self.uniform_sampler is None:
            raise ValueError("continuous space lacks density/volume for a normalization check")
        lam = self.uniform_sampler(keyed_stream(seed, _LHV_STREAM, 1), samples)
        vals = self.volume * self.density(lam)
        return Estimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples)))


Response = Callable[[np.ndarray, np.ndarray], np.ndarray]
ProbTable = Callable[[np.ndarray, np.ndarray], np.ndarray]


class _HiddenVariableModel(CorrelationModel):
    space: LambdaSpace
    closed_form: Optional[ProbTable] = None
    #: Optional vectorized closed-form correlation ``(na, nb) -> E[i, j]``.
    closed_form_matrix: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    @property
    def exact(self) -> bool:  # type: ignore[override]
        return self.space.finite or self.closed_form is not None

    def _pair_values(self, na: np.ndarray, nb: np.ndarray, lam: np.ndarray) -> np.ndarray:
        """Per-lambda contribution to the correlation."""
        raise NotImplementedError

    def _pair_probabilities(self, na, nb, lam) -> np.ndarray:
        """Per-lambda joint probability tables, shape (n, 2, 2)."""
        raise NotImplementedError

    def correlation(self, a, b):
        na, nb = unit_vector(a), unit_vector(b)
        if self.closed_form is not None:
            p = self.closed_form(na, nb)
            return float(np.sum(np.outer(OUTCOMES, OUTCOMES) * p))
        if self.space.finite:
            return float(np.dot(self.space.weights, self._pair_values(na, nb, self.space.support)))
        raise TypeError(f"{self.name} has no exact correlation; use lhv_correlation")

    def joint_probabilities(self, a, b):
        na, nb = unit_vector(a), unit_vector(b)
        if self.closed_form is not None:
            return np.asarray(self.closed_form(na, nb), dtype=float)
        if self.space.finite:
            tables = self._pair_probabilities(na, nb, self.space.support)
            return np.einsum("n,nij->ij", self.space.weights, tables)
        raise TypeError(f"{self.name} has no exact probabilities; sample with lhv_correlation")

    def correlation_matrix(self, na, nb):
        na, nb = np.atleast_2d(na), np.atleast_2d(nb)
        if self.closed_form_matrix is not None:
            return self.closed_form_matrix(na, nb)
        if self.closed_form is None and self.space.finite:
            lam, w = self.space.support, self.space.weights
            ma = np.array([self._side_means(x, lam, "A") for x in na])
            mb = np.array([self._side_means(y, lam, "B") for y in nb])
            return (ma * w) @ mb.T
        return super().correlation_matrix(na, nb)


class DeterministicStrategy(_HiddenVariableModel):
    """Outcomes ``A(a, lambda)``, ``B(b, lambda)`` in {-1, +1}.

    Response functions are vectorized over hidden variables: they take a unit
    3-vector and an array of lambdas and return an array of +-1.
    """

    def __init__(
        self,
        response_A: Response,
        response_B: Response,
        space: LambdaSpace,
        closed_form: Optional[ProbTable] = None,
        name: str = "lhv/deterministic",
    ):
        self.response_A = response_A
        self.response_B = response_B
        self.space = space
        self.closed_form = closed_form
        self.name = name

    def outcomes(self, na, nb, lam) -> tuple[np.ndarray, np.ndarray]:
        A = np.asarray(self.response_A(na, lam))
        B = np.asarray(self.response_B(nb, lam))
        if not (np.all(np.abs(A) == 1) and np.all(np.abs(B) == 1)):
            raise ValueError(f"{self.name}: responses must be exactly +1 or -1")
        return A, B

    def _pair_values(self, na, nb, lam):
        A, B = self.outcomes(na, nb, lam)
        return (A * B).astype(float)

    def _side_means(self, n, lam, side):
        fn = self.response_A if side == "A" else self.response_B
        return np.asarray(fn(n, lam), dtype=float)

    def _pair_probabilities(self, na, nb, lam):
        A, B = self.outcomes(na, nb, lam)
        o = np.array(OUTCOMES)
        pa = (1 + o[None, :] * A[:, None]) / 2
        pb = (1 + o[None, :] * B[:, None]) / 2
        return pa[:, :, None] * pb[:, None, :]


class FactorizedModel(_HiddenVariableModel):
    """``p(alpha, beta | a, b, lambda) = p(alpha | a, lambda) p(beta | b, lambda)``.

    ``prob_A(n, lam)`` returns ``p(+1 | n, lambda)`` per lambda; the -1
    probability is its complement, so each side is normalized by construction.
    """

    def __init__(self, prob_A: Response, prob_B: Response, space: LambdaSpace, name: str = "lhv/factorized"):
        self.prob_A = prob_A
        self.prob_B = prob_B
        self.space = space
        self.name = name

    def _side_probs(self, na, nb, lam):
        pa = np.asarray(self.prob_A(na, lam), dtype=float)
        pb = np.asarray(self.prob_B(nb, lam), dtype=float)
        if np.any((pa < 0) | (pa > 1)) or np.any((pb < 0) | (pb > 1)):
            raise ValueError(f"{self.name}: conditional probabilities outside [0, 1]")
        return pa, pb

    def _pair_values(self, na, nb, lam):
        pa, pb = self._side_probs(na, nb, lam)
        return (2 * pa - 1) * (2 * pb - 1)

    def _side_means(self, n, lam, side):
        fn = self.prob_A if side == "A" else self.prob_B
        return 2 * np.asarray(fn(n, lam), dtype=float) - 1

    def _pair_probabilities(self, na, nb, lam):
        pa, pb = self._side_probs(na, nb, lam)
        ta = np.stack([pa, 1 - pa], axis=1)
        tb = np.stack([pb, 1 - pb], axis=1)
        return ta[:, :, None] * tb[:, None, :]


def lhv_correlation(model: _HiddenVariableModel, a: DirectionLike, b: DirectionLike, samples: int, seed: int = 0) -> Estimate:
    """Monte Carlo estimate of the correlation integral with its standard error.

    Draws are split into fixed blocks, each with its own keyed stream, and
    reduced in block order.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    na, nb = unit_vector(a), unit_vector(b)
    total = 0.0
    total_sq = 0.0
    for i, size in blocks(samples):
        lam = model.space.sampler(keyed_stream(seed, _LHV_STREAM, 0, i), size)
        x = model._pair_values(na, nb, lam)
        total += float(x.sum())
        total_sq += float(np.dot(x, x))
    mean = total / samples
    if samples == 1:
        return Estimate(mean, float("nan"))
    var = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
    return Estimate(mean, float(np.sqrt(var / samples)))


def _sign(x: np.ndarray) -> np.ndarray:
    # sign(0) := +1
    return np.where(x >= 0, 1, -1)


def _angle_between(na: np.ndarray, nb: np.ndarray) -> np.ndarray:
    """Pairwise angles between rows of ``na`` and ``nb`` (atan2 form, accurate near 0 and pi)."""
    dot = na @ nb.T
    cross = np.linalg.norm(np.cross(na[:, None, :], nb[None, :, :]), axis=-1)
    return np.arctan2(cross, dot)


def sign_model_correlation(na, nb) -> float:
    """Closed form ``-1 + 2 theta / pi`` of the sphere sign-model."""
    theta = _angle_between(unit_vector(na)[None, :], unit_vector(nb)[None, :])[0, 0]
    return -1.0 + 2.0 * float(theta) / np.pi


def _sign_model_table(na, nb):
    e = sign_model_correlation(na, nb)
    return 0.25 * (1 + np.outer(OUTCOMES, OUTCOMES) * e)


def sign_model() -> DeterministicStrategy:
    """lambda uniform on the sphere, ``A = sign(a . lambda)``, ``B = -sign(b . lambda)``.

    Both marginals are unbiased, so the closed-form table is
    ``(1 + alpha beta E) / 4``.
    """
    model = DeterministicStrategy(
        response_A=lambda n, lam: _sign(lam @ n),
        response_B=lambda n, lam: -_sign(lam @ n),
        space=LambdaSpace.sphere(),
        closed_form=_sign_model_table,
        name="lhv/sign",
    )
    model.closed_form_matrix = lambda na, nb: -1.0 + 2.0 * _angle_between(na, nb) / np.pi
    return model


def chsh_function(A, A_prime, B, B_prime):
    """``(A + A') B + (A - A') B'``; equals +-2 for +-1 inputs."""
    return (A + A_prime) * B + (A - A_prime) * B_prime


def standard_settings() -> SettingsQuad:
    """x-z plane quad with a=0, a'=90, b=45, b'=-45 degrees."""
    return SettingsQuad.planar(0.0, 90.0, 45.0, -45.0)


_COLS = {"a": 0, "a_prime": 1, "b": 2, "b_prime": 3}


@dataclass(frozen=True, eq=False)
class FiniteStrategy(CorrelationModel):
    """Responses for one settings quad over a finite weighted lambda set.

    ``p_plus[k, j]`` is the probability of outcome +1 for hidden value ``k``
    at setting ``j`` in the order (a, a', b, b').  Entries in {0, 1} give a
    deterministic strategy.
    """

    settings: SettingsQuad
    p_plus: np.ndarray
    weights: np.ndarray
    name: str = field(default="lhv/finite")

    def __post_init__(self):
        p = np.array(self.p_plus, dtype=float)
        w = np.array(self.weights, dtype=float)
        if p.ndim != 2 or p.shape[1] != 4 or p.shape[0] != len(w):
            raise ValueError("p_plus must have shape (n, 4) matching the weights")
        if np.any((p < 0) | (p > 1)):
            raise ValueError("p_plus entries must lie in [0, 1]")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        p.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "p_plus", p)
        object.__setattr__(self, "weights", w)

    @property
    def deterministic(self) -> bool:
        return bool(np.all((self.p_plus == 0) | (self.p_plus == 1)))

    @property
    def means(self) -> np.ndarray:
        """Expected outcome ``2 p - 1`` per (lambda, setting)."""
        return 2 * self.p_plus - 1

    def _column(self, d, names) -> int:
        n = unit_vector(d)
        for name in names:
            if np.allclose(getattr(self.settings, name).n, n, atol=1e-12):
                return _COLS[name]
        raise ValueError(f"{self.name} is only defined on its own settings quad")

    def correlation(self, a, b):
        i = self._column(a, ("a", "a_prime"))
        j = self._column(b, ("b", "b_prime"))
        return float(np.dot(self.weights, self.means[:, i] * self.means[:, j]))

    def joint_probabilities(self, a, b):
        i = self._column(a, ("a", "a_prime"))
        j = self._column(b, ("b", "b_prime"))
        pa = np.stack([self.p_plus[:, i], 1 - self.p_plus[:, i]], axis=1)
        pb = np.stack([self.p_plus[:, j], 1 - self.p_plus[:, j]], axis=1)
        return np.einsum("n,ni,nj->ij", self.weights, pa, pb)


def exact_chsh_finite(s: FiniteStrategy, settings: Optional[SettingsQuad] = None) -> float:
    """Exact S by summing ``f(lambda)`` against the weights."""
    if abs(float(np.sum(s.weights)) - 1.0) > WEIGHT_TOL:
        raise ValueError(f"weights sum to {float(np.sum(s.weights))!r}, not 1")
    if settings is not None and settings != s.settings:
        raise ValueError("strategy was built for a different settings quad")
    m = s.means
    f = m[:, 0] * m[:, 2] + m[:, 0] * m[:, 3] + m[:, 1] * m[:, 2] - m[:, 1] * m[:, 3]
    return float(np.dot(s.weights, f))


def _random_support(rng, n_lambda):
    if n_lambda is None:
        n_lambda = int(rng.integers(1, 17))
    return n_lambda, rng.dirichlet(np.ones(n_lambda))


def random_deterministic_strategy(seed, settings: Optional[SettingsQuad] = None, n_lambda: Optional[int] = None) -> FiniteStrategy:
    """Random map lambda -> (A_a, A_a', B_b, B_b') in {+-1}^4 with random weights."""
    rng = np.random.default_rng(seed)
    n, w = _random_support(rng, n_lambda)
    p = rng.integers(0, 2, size=(n, 4)).astype(float)
    return FiniteStrategy(settings or standard_settings(), p, w, name="lhv/random-deterministic")


def random_factorized_strategy(seed, settings: Optional[SettingsQuad] = None, n_lambda: Optional[int] = None) -> FiniteStrategy:
    """Like :func:`random_deterministic_strategy` with ``p(+1 | setting, lambda)`` uniform in [0, 1]."""
    rng = np.random.default_rng(seed)
    n, w = _random_support(rng, n_lambda)
    p = rng.random((n, 4))
    return FiniteStrategy(settings or standard_settings(), p, w, name="lhv/random-factorized")
