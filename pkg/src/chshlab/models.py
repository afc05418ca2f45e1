"""Common interface for correlation models and the CHSH settings quadruple."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Direction, DirectionLike, unit_vector

__all__ = ["OUTCOMES", "CorrelationModel", "BilinearModel", "SettingsQuad"]

#: Outcome labels; probability tables are indexed ``p[i, j]`` for
#: ``alpha = OUTCOMES[i]``, ``beta = OUTCOMES[j]``.
OUTCOMES = (1, -1)

_SIGNS = np.outer(OUTCOMES, OUTCOMES)


class CorrelationModel:
    """Given settings ``(a, b)`` a model yields ``P(alpha, beta)`` and ``E(a, b)``.

    Subclasses implement :meth:`correlation` and :meth:`joint_probabilities`.
    ``exact`` is False for models whose values are only available as Monte
    Carlo estimates.
    """

    name = "model"
    exact = True

    def correlation(self, a: DirectionLike, b: DirectionLike) -> float:
        raise NotImplementedError

    def joint_probabilities(self, a: DirectionLike, b: DirectionLike) -> np.ndarray:
        raise NotImplementedError

    def correlation_matrix(self, na: np.ndarray, nb: np.ndarray) -> np.ndarray:
        """``E[i, j]`` for unit-vector rows ``na[i]`` and ``nb[j]``."""
        na = np.atleast_2d(na)
        nb = np.atleast_2d(nb)
        return np.array([[self.correlation(x, y) for y in nb] for x in na])

    def correlation_from_probabilities(self, a, b) -> float:
        return float(np.sum(_SIGNS * self.joint_probabilities(a, b)))


class BilinearModel(CorrelationModel):
    """Models whose correlation is ``a^T T b`` for a fixed 3x3 tensor ``T``.

    The tensor is recovered from nine basis evaluations of
    :meth:`correlation`; it serves vectorized grid evaluation only.
    """

    _tensor = None

    def correlation_tensor(self) -> np.ndarray:
        if self._tensor is None:
            eye = np.eye(3)
            t = np.array([[self.correlation(eye[i], eye[j]) for j in range(3)] for i in range(3)])
            self._tensor = t
        return self._tensor

    def correlation_matrix(self, na, nb):
        return np.atleast_2d(na) @ self.correlation_tensor() @ np.atleast_2d(nb).T

    def joint_probabilities(self, a, b):
        e = self.correlation(a, b)
        return 0.25 * (1.0 + _SIGNS * e)


@dataclass(frozen=True)
class SettingsQuad:
    """Measurement settings ``a, a'`` (Alice) and ``b, b'`` (Bob)."""

    a: Direction
    a_prime: Direction
    b: Direction
    b_prime: Direction

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            d = getattr(self, name)
            if not isinstance(d, Direction):
                object.__setattr__(self, name, Direction.from_vector(unit_vector(d)))

    @property
    def pairs(self) -> tuple:
        """The four setting pairs in CHSH order: (a,b), (a,b'), (a',b), (a',b')."""
        return (
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        )

    def angles(self) -> np.ndarray:
        """Flat (theta, phi) x 4 array in radians."""
        return np.array([x for d in (self.a, self.a_prime, self.b, self.b_prime) for x in (d.theta, d.phi)])

    @classmethod
    def from_angles(cls, angles) -> "SettingsQuad":
        x = np.asarray(angles, dtype=float)
        if x.shape != (8,):
            raise ValueError(f"need 8 angles, got shape {x.shape}")
        return cls(*(Direction(float(x[2 * k]), float(x[2 * k + 1])) for k in range(4)))

    @classmethod
    def from_degrees(cls, angles) -> "SettingsQuad":
        return cls.from_angles(np.deg2rad(np.asarray(angles, dtype=float)))

    def degrees(self) -> list[float]:
        return [float(x) for x in np.rad2deg(self.angles())]

    @classmethod
    def planar(cls, a: float, a_prime: float, b: float, b_prime: float) -> "SettingsQuad":
        """Settings in the x-z plane from polar angles in degrees (negative allowed)."""

        def d(deg):
            t = np.deg2rad(deg)
            return Direction.from_vector([np.sin(t), 0.0, np.cos(t)])

        return cls(d(a), d(a_prime), d(b), d(b_prime))
