"""CHSH evaluation over any :class:`~chshlab.models.CorrelationModel`.

``S = E(a, b) + E(a, b') + E(a', b) - E(a', b')``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .algebra import Direction
from .models import OUTCOMES, CorrelationModel, SettingsQuad
from .streams import blocks, keyed_stream

__all__ = [
    "ChshResult",
    "CoincidenceCounts",
    "ChshOptimum",
    "SignalingReport",
    "chsh_value",
    "chsh_exact",
    "maximize_chsh",
    "direction_grid",
    "simulate_events",
    "chsh_from_counts",
    "no_signaling_audit",
]

PROB_TOL = 1e-9
SIGNALING_TOL = 1e-9
_EVENT_STREAM = 0x4556
_AUDIT_STREAM = 0x4155
_SIGNS = np.outer(OUTCOMES, OUTCOMES)


def chsh_value(terms) -> float:
    e_ab, e_abp, e_apb, e_apbp = (float(t) for t in terms)
    return e_ab + e_abp + e_apb - e_apbp


@dataclass(frozen=True)
class CoincidenceCounts:
    """``counts[k, i, j]``: detections with outcomes ``(OUTCOMES[i], OUTCOMES[j])`` at setting pair ``k``."""

    counts: np.ndarray
    settings: Optional[SettingsQuad] = None

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.shape != (4, 2, 2):
            raise ValueError(f"counts must have shape (4, 2, 2), got {c.shape}")
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def n_tot(self) -> np.ndarray:
        return self.counts.sum(axis=(1, 2))


@dataclass(frozen=True)
class ChshResult:
    terms: tuple
    S: float
    stderr: float = 0.0
    settings: Optional[SettingsQuad] = None
    counts: Optional[CoincidenceCounts] = None

    @classmethod
    def from_terms(cls, terms, stderr=0.0, settings=None, counts=None) -> "ChshResult":
        terms = tuple(float(t) for t in terms)
        return cls(terms, chsh_value(terms), float(stderr), settings, counts)


def chsh_exact(model: CorrelationModel, q: SettingsQuad) -> ChshResult:
    terms = [model.correlation(x, y) for x, y in q.pairs]
    return ChshResult.from_terms(terms, 0.0, q)


def direction_grid(step_deg: float = 15.0) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographically ordered (theta, phi) grid and its unit vectors.

    Poles appear once.
    """
    thetas = np.deg2rad(np.arange(0.0, 180.0 + 1e-9, step_deg))
    phis = np.deg2rad(np.arange(0.0, 360.0 - 1e-9, step_deg))
    angles = []
    for t in thetas:
        if np.isclose(t, 0.0) or np.isclose(t, np.pi):
            angles.append((t, 0.0))
        else:
            angles.extend((t, p) for p in phis)
    angles = np.array(angles)
    st = np.sin(angles[:, 0])
    n = np.stack([st * np.cos(angles[:, 1]), st * np.sin(angles[:, 1]), np.cos(angles[:, 0])], axis=1)
    return angles, n


@dataclass
class ChshOptimum:
    settings: SettingsQuad
    S: float
    signed_S: float
    grid_S: float
    converged: bool
    evaluations: int
    restarts: int
    history: list = field(default_factory=list)


def _grid_candidates(E: np.ndarray, restarts: int):
    """Best ``restarts`` (value, sign, i, j, k, l) grid points for ``|S|``.

    For fixed (a, a') the b and b' maximizations separate:
    ``max S = max_b (E[a,b] + E[a',b]) + max_b' (E[a,b'] - E[a',b'])``.
    """
    D = E.shape[0]
    smax = np.empty((D, D))
    smin = np.empty((D, D))
    arg = np.empty((D, D, 4), dtype=np.int64)
    for i in range(D):
        U = E[i][None, :] + E
        V = E[i][None, :] - E
        smax[i] = U.max(axis=1) + V.max(axis=1)
        smin[i] = U.min(axis=1) + V.min(axis=1)
        arg[i, :, 0] = U.argmax(axis=1)
        arg[i, :, 1] = V.argmax(axis=1)
        arg[i, :, 2] = U.argmin(axis=1)
        arg[i, :, 3] = V.argmin(axis=1)
    vals = np.concatenate([smax.ravel(), -smin.ravel()])
    order = np.argsort(-vals, kind="stable")[:restarts]
    out = []
    for idx in order:
        sign = 1 if idx < D * D else -1
        i, j = divmod(int(idx % (D * D)), D)
        k, l = (arg[i, j, 0], arg[i, j, 1]) if sign > 0 else (arg[i, j, 2], arg[i, j, 3])
        out.append((float(vals[idx]), sign, i, j, int(k), int(l)))
    return out


def _s_of_angles(model: CorrelationModel, x: np.ndarray) -> float:
    t, p = x[0::2], x[1::2]
    st = np.sin(t)
    n = np.stack([st * np.cos(p), st * np.sin(p), np.cos(t)], axis=1)
    E = model.correlation_matrix(n[:2], n[2:])
    return float(E[0, 0] + E[0, 1] + E[1, 0] - E[1, 1])


def _canonical(x: np.ndarray) -> SettingsQuad:
    t, p = x[0::2], x[1::2]
    st = np.sin(t)
    n = np.stack([st * np.cos(p), st * np.sin(p), np.cos(t)], axis=1)
    return SettingsQuad(*(Direction.from_vector(v) for v in n))


def maximize_chsh(
    model: CorrelationModel,
    restarts: int = 4,
    tol: float = 1e-8,
    seed: int = 0,
    grid_step: float = 15.0,
    maxiter: int = 4000,
) -> ChshOptimum:
    """Largest ``|S|`` over all four settings on the sphere.

    A coarse grid (``grid_step`` degrees in both angles) is searched exactly;
    the ``restarts`` best grid points are refined with Nelder-Mead over the
    eight angles.  Ties on the grid go to the lexicographically first point.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if not getattr(model, "exact", True):
        raise TypeError(f"{model.name} has no exact correlations to optimize")
    angles, n = direction_grid(grid_step)
    E = np.asarray(model.correlation_matrix(n, n), dtype=float)
    cands = _grid_candidates(E, restarts)
    rng = np.random.default_rng(seed)
    step = np.deg2rad(grid_step) / 2
    best = None
    evaluations = 0
    history = []
    for value, sign, i, j, k, l in cands:
        x0 = np.concatenate([angles[i], angles[j], angles[k], angles[l]])
        simplex = np.vstack([x0, x0 + np.diag(step * rng.uniform(0.5, 1.0, size=8))])
        res = minimize(
            lambda x: -sign * _s_of_angles(model, x),
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-10,
                "fatol": tol,
                "maxiter": maxiter,
                "maxfev": maxiter,
                "adaptive": True,
            },
        )
        evaluations += int(res.nfev)
        x, s = (res.x, -float(res.fun)) if -res.fun >= value else (x0, value)
        history.append((value, s))
        if best is None or s > best[1] + tol:
            best = (x, s, sign, bool(res.success))
    x, s, sign, ok = best
    q = _canonical(x)
    signed = chsh_exact(model, q).S
    return ChshOptimum(q, abs(signed), signed, cands[0][0], ok, evaluations, restarts, history)


def _probabilities(model: CorrelationModel, a, b) -> np.ndarray:
    p = np.asarray(model.joint_probabilities(a, b), dtype=float)
    if p.shape != (2, 2):
        raise ValueError(f"{model.name}: probability table must be 2x2")
    if p.min() < -PROB_TOL or abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"{model.name}: invalid probabilities {p.ravel().tolist()} (sum {p.sum()!r})")
    return np.clip(p, 0.0, None)


def _sample_block(cdf: np.ndarray, seed: int, pair: int, block: int, size: int) -> np.ndarray:
    u = keyed_stream(seed, _EVENT_STREAM, pair, block).random(size)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), 3)
    return np.bincount(idx, minlength=4)


def simulate_events(
    model: CorrelationModel, q: SettingsQuad, n_per_pair: int, seed: int = 0, workers: int = 1
) -> CoincidenceCounts:
    """Draw ``n_per_pair`` outcome pairs at each setting pair by inverse CDF.

    Block ``b`` of pair ``k`` uses the stream keyed ``(seed, k, b)``, so the
    counts do not depend on ``workers``.
    """
    if n_per_pair < 1:
        raise ValueError("n_per_pair must be >= 1")
    cdfs = []
    for a, b in q.pairs:
        cdf = np.cumsum(_probabilities(model, a, b).ravel())
        cdf /= cdf[-1]
        cdfs.append(cdf)
    tasks = [(k, blk, size) for k in range(4) for blk, size in blocks(n_per_pair)]

    def run(task):
        k, blk, size = task
        return _sample_block(cdfs[k], seed, k, blk, size)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, tasks))
    else:
        parts = [run(t) for t in tasks]
    counts = np.zeros((4, 4), dtype=np.int64)
    for (k, _, _), part in zip(tasks, parts):
        counts[k] += part
    return CoincidenceCounts(counts.reshape(4, 2, 2), q)


def chsh_from_counts(c: CoincidenceCounts) -> ChshResult:
    """Experimental correlations ``sum alpha beta N / N_tot`` assembled into S.

    The standard error is the root-sum-square of the per-pair errors
    ``sqrt((1 - E^2) / N_tot)``.
    """
    n_tot = c.n_tot
    if np.any(n_tot == 0):
        raise ValueError(f"setting pairs without coincidences: {np.flatnonzero(n_tot == 0).tolist()}")
    terms = np.einsum("ij,kij->k", _SIGNS, c.counts) / n_tot
    var = (1.0 - terms**2) / n_tot
    return ChshResult.from_terms(terms, float(np.sqrt(var.sum())), c.settings, c)


@dataclass
class SignalingReport:
    passed: bool
    max_alice: float
    max_bob: float
    trials: int

    def __bool__(self):
        return self.passed

    @property
    def max_deviation(self) -> float:
        return max(self.max_alice, self.max_bob)


def no_signaling_audit(
    model: CorrelationModel, trials: int = 100, seed: int = 0, settings: Optional[SettingsQuad] = None
) -> SignalingReport:
    """Largest change of one side's marginals when the other side switches setting.

    Random settings are used unless ``settings`` is given (or the model is
    tied to one quad), in which case the quad's own pairs are compared.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if settings is None:
        settings = getattr(model, "settings", None)
    if settings is not None:
        draws = [(settings.a, settings.a_prime, settings.b, settings.b_prime)]
    else:
        rng = keyed_stream(seed, _AUDIT_STREAM)
        v = rng.standard_normal((trials, 4, 3))
        v /= np.linalg.norm(v, axis=2, keepdims=True)
        draws = [tuple(row) for row in v]
    max_a = max_b = 0.0
    for a, ap, b, bp in draws:
        pab = _probabilities(model, a, b)
        pabp = _probabilities(model, a, bp)
        papb = _probabilities(model, ap, b)
        max_a = max(max_a, float(np.max(np.abs(pab.sum(axis=1) - pabp.sum(axis=1)))))
        max_b = max(max_b, float(np.max(np.abs(pab.sum(axis=0) - papb.sum(axis=0)))))
    passed = max_a < SIGNALING_TOL and max_b < SIGNALING_TOL
    return SignalingReport(passed, max_a, max_b, len(draws))
