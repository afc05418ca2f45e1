"""Invariant suites behind ``chshlab verify``.

Each suite returns a :class:`SuiteReport` with the largest violation it saw.
``bell_vector_fn`` replaces :func:`~chshlab.algebra.bell_vector` in the
suites that consume Bell vectors, so a mutated vector can be injected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import BellState, bell_vector, inner16, state_vector, tensor
from .chsh import SIGNALING_TOL, no_signaling_audit
from .extensions import ContinuousBasisModel, IndependentSourceModel, PeakedDensity, RegularizedDelta, WernerModel
from .gudder import GudderModel, ReferenceMeasure, check_orthogonal_additivity, gudder_correlation, measure
from .lhv import exact_chsh_finite, random_deterministic_strategy, random_factorized_strategy, sign_model
from .quantum import QuantumModel, born_probability, qm_correlation, qm_joint_probability

__all__ = ["SuiteReport", "SUITES", "run_suites", "format_report"]

EQ_TOL = 1e-12


@dataclass(frozen=True)
class SuiteReport:
    name: str
    passed: bool
    max_violation: float
    tolerance: float
    checks: int

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<24} {status}  max_violation={self.max_violation:.3e}  tol={self.tolerance:.0e}  checks={self.checks}"


def _report(name, violations, tol) -> SuiteReport:
    v = np.asarray(violations, dtype=float).ravel()
    worst = float(v.max()) if v.size else 0.0
    return SuiteReport(name, worst <= tol, worst, tol, int(v.size))


def _units(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def born_suite(seed=0, pairs=10_000, **_) -> SuiteReport:
    rng = np.random.default_rng(seed)
    phi, psi = _units(rng, pairs), _units(rng, pairs)
    diffs = [abs(measure(ReferenceMeasure(p), q) - born_probability(p, q)) for p, q in zip(phi, psi)]
    return _report("born_equivalence", diffs, EQ_TOL)


def orthonormality_suite(bell_vector_fn=bell_vector, **_) -> SuiteReport:
    vecs = [bell_vector_fn(s) for s in BellState]
    gram = np.array([[inner16(u, w) for w in vecs] for u in vecs])
    return _report("bell_orthonormality", np.abs(gram - np.eye(4)), EQ_TOL)


def requirement_suite(seed=0, references=100, step_deg=1.0, **_) -> SuiteReport:
    """f = 1 on the reference, 0 on its antipode and negation, within [0, 1] on an angular grid."""
    rng = np.random.default_rng(seed)
    t = np.deg2rad(np.arange(0.0, 180.0 + 1e-9, step_deg))
    p = np.deg2rad(np.arange(0.0, 360.0, step_deg))
    T, P = np.meshgrid(t, p, indexing="ij")
    grid = np.stack([np.ones(T.size), (np.sin(T) * np.cos(P)).ravel(), (np.sin(T) * np.sin(P)).ravel(), np.cos(T).ravel()], axis=1)
    viol = []
    for phi in _units(rng, references):
        m = ReferenceMeasure(phi)
        viol.append(abs(m(state_vector(phi)) - 1.0))
        viol.append(abs(m(state_vector(-phi))))
        viol.append(abs(m(-state_vector(-phi))))
        f = grid @ m.form.k.components + m.form.c * np.einsum("ij,ij->i", grid, grid)
        viol.append(max(0.0, float(-f.min()), float(f.max() - 1.0)))
    return _report("requirement_sweep", viol, EQ_TOL)


def additivity_suite(seed=0, trials=2000, **_) -> SuiteReport:
    rep = check_orthogonal_additivity(ReferenceMeasure([0.0, 0.0, 1.0]).form, trials=trials, seed=seed)
    return SuiteReport("orthogonal_additivity", rep.passed, rep.max_violation, 1e-10, trials)


def correlation_suite(seed=0, pairs=1000, bell_vector_fn=bell_vector, **_) -> SuiteReport:
    rng = np.random.default_rng(seed)
    viol = []
    for s in BellState:
        phi = bell_vector_fn(s)
        for a, b in zip(_units(rng, pairs), _units(rng, pairs)):
            e = gudder_correlation(s, a, b, phi_ab=phi)
            viol.append(abs(e - qm_correlation(s, a, b)))
            for al in (1, -1):
                for be in (1, -1):
                    va, vb = state_vector(a, al), state_vector(b, be)
                    pg = 0.5 * inner16(tensor(va, vb), phi)
                    viol.append(abs(pg - qm_joint_probability(s, a, b, al, be)))
    return _report("correlation_equivalence", viol, EQ_TOL)


def exact_models():
    rho = PeakedDensity(0.0, 0.1)
    models = []
    for s in BellState:
        models += [QuantumModel(s), GudderModel(s), WernerModel(0.6, s)]
    models += [
        ContinuousBasisModel("PhiPlus", rho, rho, RegularizedDelta(1e-3)),
        IndependentSourceModel("PsiMinus", rho, PeakedDensity(0.3, 0.2)),
        sign_model(),
        random_factorized_strategy(1),
        random_deterministic_strategy(2),
    ]
    return models


def signaling_suite(seed=0, trials=50, **_) -> SuiteReport:
    devs = [no_signaling_audit(m, trials=trials, seed=seed).max_deviation for m in exact_models()]
    return SuiteReport("no_signaling", max(devs) < SIGNALING_TOL, max(devs), SIGNALING_TOL, len(devs))


def lhv_bound_suite(seed=0, strategies=5000, **_) -> SuiteReport:
    excess = []
    for k in range(strategies):
        for make in (random_deterministic_strategy, random_factorized_strategy):
            s = exact_chsh_finite(make((seed, k)))
            excess.append(max(0.0, abs(s) - 2.0))
    return _report("lhv_bound", excess, 1e-12)


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "born_equivalence": born_suite,
    "bell_orthonormality": orthonormality_suite,
    "requirement_sweep": requirement_suite,
    "orthogonal_additivity": additivity_suite,
    "correlation_equivalence": correlation_suite,
    "no_signaling": signaling_suite,
    "lhv_bound": lhv_bound_suite,
}


def run_suites(seed: int = 0, bell_vector_fn=bell_vector, only=None) -> list[SuiteReport]:
    names = list(SUITES) if only is None else list(only)
    return [SUITES[n](seed=seed, bell_vector_fn=bell_vector_fn) for n in names]


def format_report(reports) -> str:
    lines = [r.line() for r in reports]
    ok = all(r.passed for r in reports)
    lines.append(f"{'overall':<24} {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines)
