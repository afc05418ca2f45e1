"""Real linear algebra over V4 and the tensor-product space V4 (x) V4.

A one-particle state or observable is a :class:`FourVector` ``(v0, v1, v2, v3)``
with the Euclidean inner product.  Two-particle objects are
:class:`BipartiteVector` instances holding the 4x4 coefficient array ``c`` with
respect to the product basis ``e_mu (x) e_nu``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "Direction",
    "FourVector",
    "BipartiteVector",
    "BellState",
    "inner4",
    "tensor",
    "inner16",
    "bell_vector",
    "observable_vector",
    "state_vector",
    "unit_vector",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Direction:
    """Unit measurement direction given by polar angle ``theta`` and azimuth ``phi`` (radians)."""

    theta: float
    phi: float = 0.0

    @property
    def n(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @classmethod
    def from_vector(cls, v) -> "Direction":
        """Direction of an arbitrary nonzero 3-vector; the input is renormalized."""
        v = np.asarray(v, dtype=float)
        r = np.linalg.norm(v)
        if v.shape != (3,) or not r > 0:
            raise ValueError(f"need a nonzero 3-vector, got {v!r}")
        v = v / r
        theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
        phi = float(np.arctan2(v[1], v[0]) % (2 * np.pi))
        return cls(theta, phi)

    @classmethod
    def from_degrees(cls, theta: float, phi: float = 0.0) -> "Direction":
        return cls(np.deg2rad(theta), np.deg2rad(phi))

    def degrees(self) -> tuple[float, float]:
        return float(np.rad2deg(self.theta)), float(np.rad2deg(self.phi))

    def __neg__(self) -> "Direction":
        return Direction(np.pi - self.theta, (self.phi + np.pi) % (2 * np.pi))


DirectionLike = Union[Direction, np.ndarray, "list[float]", "tuple[float, ...]"]


def unit_vector(d: DirectionLike) -> np.ndarray:
    """Cartesian unit vector for a Direction or a raw 3-vector (renormalized)."""
    if isinstance(d, Direction):
        return d.n
    v = np.asarray(d, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"need a nonzero 3-vector, got {v!r}")
    r = math.sqrt(float(v @ v))
    if not r > 0:
        raise ValueError(f"need a nonzero 3-vector, got {v!r}")
    return v / r


@dataclass(frozen=True, eq=False)
class FourVector:
    """Element of V4.  ``components`` is read-only."""

    components: np.ndarray = field()

    def __post_init__(self):
        comp = _frozen(self.components)
        if comp.shape != (4,):
            raise ValueError(f"FourVector needs 4 components, got shape {comp.shape}")
        object.__setattr__(self, "components", comp)

    @classmethod
    def _owned(cls, comp: np.ndarray) -> "FourVector":
        # comp is a fresh float array of shape (4,) that nobody else holds
        obj = object.__new__(cls)
        comp.setflags(write=False)
        object.__setattr__(obj, "components", comp)
        return obj

    @classmethod
    def of(cls, v0: float, v1: float, v2: float, v3: float) -> "FourVector":
        return cls(np.array([v0, v1, v2, v3]))

    @classmethod
    def from_parts(cls, v0: float, v) -> "FourVector":
        return cls(np.concatenate([[v0], np.asarray(v, dtype=float)]))

    @classmethod
    def basis(cls, mu: int) -> "FourVector":
        e = np.zeros(4)
        e[mu] = 1.0
        return cls(e)

    @property
    def v0(self) -> float:
        return float(self.components[0])

    @property
    def v(self) -> np.ndarray:
        return self.components[1:]

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector._owned(self.components + other.components)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector._owned(self.components - other.components)

    def __mul__(self, s: float) -> "FourVector":
        return FourVector._owned(self.components * s)

    __rmul__ = __mul__

    def __neg__(self) -> "FourVector":
        return FourVector._owned(-self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, FourVector) and np.array_equal(self.components, other.components)

    def __hash__(self):
        return hash(self.components.tobytes())

    def __repr__(self) -> str:
        return "FourVector(%s)" % ", ".join(f"{x:g}" for x in self.components)


@dataclass(frozen=True, eq=False)
class BipartiteVector:
    """Element of V4 (x) V4 as the coefficient array ``c[mu, nu]``."""

    c: np.ndarray

    def __post_init__(self):
        c = _frozen(self.c)
        if c.shape != (4, 4):
            raise ValueError(f"BipartiteVector needs a 4x4 array, got shape {c.shape}")
        object.__setattr__(self, "c", c)

    def __add__(self, other: "BipartiteVector") -> "BipartiteVector":
        return BipartiteVector(self.c + other.c)

    def __mul__(self, s: float) -> "BipartiteVector":
        return BipartiteVector(self.c * s)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, BipartiteVector) and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash(self.c.tobytes())

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.c, compute_uv=False)

    def is_factorable(self, tol: float = 1e-12) -> bool:
        """True when the coefficient array has rank one (``c = a b^T``)."""
        s = self.singular_values()
        return s[0] > tol and s[1] <= tol * max(1.0, s[0])


class BellState(enum.Enum):
    PhiPlus = "PhiPlus"
    PhiMinus = "PhiMinus"
    PsiPlus = "PsiPlus"
    PsiMinus = "PsiMinus"

    @classmethod
    def parse(cls, name) -> "BellState":
        if isinstance(name, BellState):
            return name
        key = str(name).strip().lower()
        if key.endswith(("+", "-")):
            key = key[:-1] + ("plus" if key[-1] == "+" else "minus")
        key = key.replace("-", "").replace("_", "")
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown Bell state {name!r}; choose from {[k.value for k in cls]}")


# Diagonal signs on e_mu (x) e_mu, mu = 0..3.
_BELL_SIGNS = {
    BellState.PhiPlus: (1, 1, -1, 1),
    BellState.PhiMinus: (1, -1, 1, 1),
    BellState.PsiPlus: (1, 1, 1, -1),
    BellState.PsiMinus: (1, -1, -1, -1),
}


def inner4(a: FourVector, b: FourVector) -> float:
    return float(np.dot(a.components, b.components))


def tensor(a: FourVector, b: FourVector) -> BipartiteVector:
    return BipartiteVector(np.outer(a.components, b.components))


def inner16(a: BipartiteVector, b: BipartiteVector) -> float:
    return float(np.sum(a.c * b.c))


def bell_vector(kind: BellState) -> BipartiteVector:
    return BipartiteVector(0.5 * np.diag(np.array(_BELL_SIGNS[BellState.parse(kind)], dtype=float)))


def observable_vector(side: str, d: DirectionLike) -> FourVector:
    """Observable of Alice (``side="A"``) or Bob (``"B"``): ``(0, n)``.

    Both sides share the same form; ``side`` only documents intent and is
    validated.
    """
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    comp = np.empty(4)
    comp[0] = 0.0
    comp[1:] = unit_vector(d)
    return FourVector._owned(comp)


def state_vector(d: DirectionLike, sign: int = 1) -> FourVector:
    """The state vector ``(1, sign * n)``."""
    comp = np.empty(4)
    comp[0] = 1.0
    comp[1:] = unit_vector(d) if sign == 1 else sign * unit_vector(d)
    return FourVector._owned(comp)
