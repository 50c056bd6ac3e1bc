"""The acceptance suite: eight end-to-end checks with fixed tolerances.

Each criterion returns a :class:`CriterionResult`; :func:`run_all` runs them in
order.  The same functions back ``ricci-qc validate`` and the test suite.

Two knobs exist for exercising the suite itself:

* ``rel_tol`` overrides the integrator tolerance.  Tolerances of the checks
  that compare integrated values (criteria 1 and 2) become
  ``max(stated, 10 * rel_tol)``; everything else is unchanged.
* ``fault`` injects a known defect (see :data:`FAULTS`) so that a negative
  control can confirm the corresponding check fails.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .flow import conserved_drift, validate_asymptotics, validate_closed_form
from .frames import (DISPLAYED_TERM_COUNT, FrameParams, PARAM_NAMES, displayed_norm_sq,
                     frame_matrix, frame_symbols, reduced_params, transition_matrix)
from .geometry import (ClassId, ClassParams, Conserved, InitialData, class_dimension, conserved)
from .integrate import IntegratorConfig, integrate
from .metric import DiagonalMetric, congruence_transport, frame_quotient, norm_sq
from .quasiconv import (Decision, analytic_membership, dimension_probe, numeric_membership)
from .sampling import cross_cases, random_init, random_params

__all__ = ["CriterionResult", "SuiteOptions", "FAULTS", "CRITERIA", "run_all", "worker_count"]

FAULTS = ("conserved",)
DEFAULT_REL_TOL = 1e-10
THREADS_ENV = "RICCI_QC_THREADS"


@dataclass(frozen=True)
class SuiteOptions:
    seed: int = 20240101
    rel_tol: float = DEFAULT_REL_TOL
    fault: Optional[str] = None
    threads: Optional[int] = None

    def __post_init__(self):
        if self.fault is not None and self.fault not in FAULTS:
            raise ValueError(f"unknown fault {self.fault!r}; known: {FAULTS}")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")

    def config(self, t_end: float) -> IntegratorConfig:
        return IntegratorConfig(t_end=t_end, rel_tol=self.rel_tol)

    def scaled(self, stated: float) -> float:
        """Tolerance for a check on integrated values, loosened with ``rel_tol``."""
        if self.rel_tol <= DEFAULT_REL_TOL:
            return stated
        return max(stated, 10.0 * self.rel_tol)

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    failures: tuple[str, ...] = ()
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.title}: {self.detail}"


def worker_count() -> int:
    """Worker threads for batch work, capped by ``RICCI_QC_THREADS``."""
    raw = os.environ.get(THREADS_ENV)
    available = os.cpu_count() or 1
    if raw is None or raw == "":
        return available
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


class _Collector:
    def __init__(self):
        self.failures: list[str] = []
        self.worst = 0.0

    def check(self, ok: bool, what: str, value: float = 0.0):
        self.worst = max(self.worst, value)
        if not ok:
            self.failures.append(what)


# --- 1. closed forms --------------------------------------------------------

def closed_form_cases(rng: np.random.Generator) -> list[tuple[ClassId, ClassParams, InitialData]]:
    fixed = [
        (ClassId.A2iv, ClassParams(k=2.0), InitialData(1, 1, 1, 1)),
        (ClassId.A2iv, ClassParams(k=-2.0), InitialData(1, 2, 3, 4)),
        (ClassId.A2iv, ClassParams(k=0.5), InitialData(1, 2, 3, 4)),
        (ClassId.A4, ClassParams(), InitialData(1, 1, 1, 1)),
        (ClassId.A6, ClassParams(), InitialData(2, 1, 3, 1)),
        (ClassId.A7ii, ClassParams(a2=0.0), InitialData(1, 1, 1, 1)),
        (ClassId.A7ii, ClassParams(a2=0.5), InitialData(1, 0.75, 1, 1)),
        (ClassId.A3, ClassParams(k=1.0), InitialData(2, 2, 1, 1)),
    ]
    extra = []
    for cls, params, _ in fixed:
        init = random_init(cls, params, rng)
        if cls is ClassId.A3:
            init = InitialData(init.lam1, init.lam1, init.lam3, init.lam4)
        extra.append((cls, params, init))
    return fixed + extra


def criterion_1(opts: SuiteOptions) -> CriterionResult:
    tol = opts.scaled(1e-7)
    col = _Collector()
    cases = closed_form_cases(opts.rng(1))
    for cls, params, init in cases:
        err = validate_closed_form(cls, params, init, (1.0, 10.0, 100.0), opts.config(100.0))
        col.check(err < tol, f"{cls} {params.as_dict()} {init.as_tuple()}: error {err:.2e}", err)
    return CriterionResult(1, "closed-form oracle equivalence", not col.failures,
                           f"{len(cases)} cases, max rel error {col.worst:.2e} (tol {tol:.0e})",
                           tuple(col.failures))


# --- 2. conserved quantities ------------------------------------------------

CONSERVED_CASES = (
    (ClassId.A5, ClassParams(), InitialData(2, 3, 1, 1), ("AB",)),
    (ClassId.A7i, ClassParams(), InitialData(1, 2, 3, 4), ("BCD²", "AD(B−C)")),
    (ClassId.A7i, ClassParams(), InitialData(1, 2, 2, 4), ("BCD²", "AD(B−C)")),
    (ClassId.A7ii, ClassParams(a2=0.5), InitialData(1, 0.75, 1, 1), ("BD",)),
    (ClassId.A8, ClassParams(), InitialData(1, 2, 3, 4), ("BCD²", "AD(B+C)")),
    (ClassId.A9ii, ClassParams(a3=1.0), InitialData(1, 1, 2, 1), ("(A+C)/(AC²)",)),
)


def criterion_2(opts: SuiteOptions) -> CriterionResult:
    tol = opts.scaled(1e-8)
    col = _Collector()
    for cls, params, init, names in CONSERVED_CASES:
        traj = integrate(cls, params, init, opts.config(100.0))
        qs = [q for q in conserved(cls, params, init) if q.name in names]
        if opts.fault == "conserved":
            qs = [Conserved(q.name, q.value * (1.0 + 1e-6) + 1e-6, q.evaluate) for q in qs]
        drift = conserved_drift(traj, qs)
        for name in names:
            d = drift.per_name[name]
            kind = "abs" if name in drift.absolute else "rel"
            col.check(d < tol, f"{cls} {name} {kind} drift {d:.2e}", d)
    return CriterionResult(2, "conserved quantities", not col.failures,
                           f"max drift {col.worst:.2e} (tol {tol:.0e})", tuple(col.failures))


# --- 3. asymptotics ---------------------------------------------------------

ASYMPTOTIC_CASES = (
    # class, params, init, horizon, {component: tolerance}
    (ClassId.A7i, ClassParams(), InitialData(1, 1, 1, 1), 1e5, {"A": 0.01, "B/C": 0.01}),
    (ClassId.A7i, ClassParams(), InitialData(1, 2, 3, 4), 1e5, {"A": 0.01, "B/C": 0.01}),
    (ClassId.A3, ClassParams(k=1.0), InitialData(1, 4, 5, 1), 1e5, {"A": 0.01, "B": 0.01}),
    (ClassId.A8, ClassParams(), InitialData(1, 1, 1, 1), 1e5, {"A": 0.02}),
    (ClassId.A8, ClassParams(), InitialData(1, 2, 3, 4), 1e5, {"A": 0.02}),
    (ClassId.A9ii, ClassParams(a3=1.0), InitialData(1, 1, 2, 1), 1e5, {"C": 0.01}),
)


def criterion_3(opts: SuiteOptions) -> CriterionResult:
    col = _Collector()
    for cls, params, init, horizon, tols in ASYMPTOTIC_CASES:
        checks = validate_asymptotics(cls, params, init, horizon, config=opts.config(1.0))
        for c in checks:
            if c.component in tols:
                col.check(c.residual < tols[c.component],
                          f"{cls} {init.as_tuple()} {c.component}: {c.residual:.2e} "
                          f"(tol {tols[c.component]}, {c.path})", c.residual)
    return CriterionResult(3, "asymptotics", not col.failures,
                           f"{len(ASYMPTOTIC_CASES)} runs, max residual {col.worst:.2e}",
                           tuple(col.failures))


# --- 4. norm expansions -----------------------------------------------------

def _random_state(rng) -> DiagonalMetric:
    return DiagonalMetric(*np.exp(rng.uniform(-2.0, 2.0, 4)))


def criterion_4(opts: SuiteOptions, n: int = 200) -> CriterionResult:
    rng = opts.rng(4)
    col = _Collector()
    for cls in DISPLAYED_TERM_COUNT:
        for _ in range(n):
            g, gbar = _random_state(rng), _random_state(rng)
            frame = FrameParams(cls, tuple(rng.uniform(-1.0, 1.0, len(PARAM_NAMES[cls]))))
            h = congruence_transport(transition_matrix(frame), gbar).minus_diagonal(g)
            generic = norm_sq(g, h)
            displayed = displayed_norm_sq(g, gbar, frame)
            rel = abs(generic - displayed) / generic
            col.check(rel < 1e-12, f"{cls}: relative difference {rel:.2e}", rel)
    return CriterionResult(4, "norm-expansion identities", not col.failures,
                           f"{len(DISPLAYED_TERM_COUNT)} classes x {n} states, "
                           f"max rel diff {col.worst:.2e}", tuple(col.failures[:10]))


# --- 5. frame quotients -----------------------------------------------------

def random_frame(cls: ClassId, rng) -> np.ndarray:
    return frame_matrix(cls, **{s: float(rng.uniform(-1.0, 1.0)) for s in frame_symbols(cls)})


def criterion_5(opts: SuiteOptions, n: int = 1000) -> CriterionResult:
    rng = opts.rng(5)
    col = _Collector()
    for cls in ClassId:
        for _ in range(n):
            lam, lam_p = random_frame(cls, rng), random_frame(cls, rng)
            built = transition_matrix(reduced_params(cls, lam, lam_p, check=False))
            quotient = frame_quotient(lam, lam_p)
            err = float(np.max(np.abs(built - quotient)))
            col.check(err < 1e-12, f"{cls}: reconstruction off by {err:.2e}", err)
    # the long multi-term parameters against an inverse-and-multiply oracle
    for cls, entries in ((ClassId.A4, {"e": (3, 1), "f": (3, 2)}),
                         (ClassId.A6, {"c": (3, 1), "d": (3, 2), "e": (0, 2)})):
        for _ in range(n):
            lam, lam_p = random_frame(cls, rng), random_frame(cls, rng)
            oracle = lam @ np.linalg.inv(lam_p)
            fp = reduced_params(cls, lam, lam_p, check=False)
            for name, (i, j) in entries.items():
                err = abs(fp[name] - oracle[i, j])
                col.check(err < 1e-12, f"{cls} {name}: off by {err:.2e}", err)
    return CriterionResult(5, "frame-quotient identities", not col.failures,
                           f"10 classes x {n} pairs + A4/A6 oracle, max dev {col.worst:.2e}",
                           tuple(col.failures[:10]))


# --- 6. membership cross-validation -----------------------------------------

@dataclass(frozen=True)
class _ClassTally:
    cls: ClassId
    agree: int = 0
    disagree: tuple[str, ...] = ()
    inconclusive: int = 0
    total: int = 0


def _cross_validate(cls: ClassId, seed: int, n_each: int) -> _ClassTally:
    rng = np.random.default_rng([seed, 6, list(ClassId).index(cls)])
    agree, inconclusive, bad = 0, 0, []
    cases = cross_cases(cls, rng, n_each, n_each)
    for c in cases:
        analytic = analytic_membership(c.cls, c.params, c.init, c.init_bar, c.frame).member
        verdict = numeric_membership(c.cls, c.params, c.init, c.init_bar, c.frame)
        if analytic != c.expected_member:
            bad.append(f"{cls}: generator produced wrong membership ({c.violated})")
        if verdict.decision is Decision.INCONCLUSIVE:
            inconclusive += 1
        elif (verdict.decision is Decision.CONVERGES) == analytic:
            agree += 1
        else:
            bad.append(f"{cls}: analytic {analytic} vs numeric {verdict.decision} "
                       f"({c.violated or 'member'}, n(T)={verdict.final_norm:.3g})")
    return _ClassTally(cls, agree, tuple(bad), inconclusive, len(cases))


def criterion_6(opts: SuiteOptions, n_each: int = 25) -> CriterionResult:
    workers = opts.threads or worker_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        tallies = list(pool.map(lambda c: _cross_validate(c, opts.seed, n_each), ClassId))
    failures = []
    worst_rate = 0.0
    for t in tallies:
        rate = t.inconclusive / t.total
        worst_rate = max(worst_rate, rate)
        failures.extend(t.disagree)
        if rate >= 0.2:
            failures.append(f"{t.cls}: inconclusive rate {rate:.0%}")
    agree = sum(t.agree for t in tallies)
    total = sum(t.total for t in tallies)
    return CriterionResult(6, "membership cross-validation", not failures,
                           f"{agree}/{total} agree, worst inconclusive rate {worst_rate:.0%}",
                           tuple(failures))


# --- 7. dimensions ----------------------------------------------------------

def criterion_7(opts: SuiteOptions, points: int = 5) -> CriterionResult:
    rng = opts.rng(7)
    col = _Collector()
    got = {}
    for cls in ClassId:
        dims = []
        for _ in range(points):
            params = random_params(cls, rng)
            dims.append(dimension_probe(cls, params, random_init(cls, params, rng)))
        got[cls] = dims
        col.check(all(d == class_dimension(cls) for d in dims),
                  f"{cls}: probe {dims} vs {class_dimension(cls)}")
    summary = ",".join(str(got[c][0]) for c in ClassId)
    return CriterionResult(7, "dimension reproduction", not col.failures,
                           f"({summary}) at {points} points each", tuple(col.failures))


# --- 8. frame exclusions ----------------------------------------------------

UNIT = InitialData(1.0, 1.0, 1.0, 1.0)

EXCLUDED = ((ClassId.A4, ClassParams(), "d"), (ClassId.A7ii, ClassParams(a2=0.0), "b"),
            (ClassId.A8, ClassParams(), "a"), (ClassId.A8, ClassParams(), "b"),
            (ClassId.A9ii, ClassParams(a3=1.0), "a"))
UNCONSTRAINED = tuple((ClassId.A2iv, ClassParams(k=2.0), n) for n in "abc") + tuple(
    (ClassId.A7i, ClassParams(), n) for n in "abc")


def exclusion_pair(cls: ClassId, params: ClassParams, name: str, value: float
                   ) -> tuple[InitialData, FrameParams]:
    """gbar data equal to the unit data, adjusted where gbar's own class parameter moves."""
    frame = FrameParams.zero(cls).replace(**{name: value})
    init_bar = UNIT
    if cls is ClassId.A7ii and name == "b":
        s_bar = 1.0 - (params.a2 - value) ** 2
        init_bar = InitialData(1.0, 1.0, 1.0 / s_bar, 1.0)
    return init_bar, frame


def criterion_8(opts: SuiteOptions, delta: float = 0.1) -> CriterionResult:
    col = _Collector()
    for group, expect_member in ((EXCLUDED, False), (UNCONSTRAINED, True)):
        for cls, params, name in group:
            for value in (delta, -delta):
                init_bar, frame = exclusion_pair(cls, params, name, value)
                member = analytic_membership(cls, params, UNIT, init_bar, frame).member
                v = numeric_membership(cls, params, UNIT, init_bar, frame)
                want = Decision.CONVERGES if expect_member else Decision.DIVERGES
                col.check(member == expect_member and v.decision is want,
                          f"{cls} {name}={value:+g}: analytic {member}, numeric {v.decision} "
                          f"(n(T)={v.final_norm:.3g})")
    return CriterionResult(8, "frame exclusions", not col.failures,
                           f"{2 * len(EXCLUDED)} excluded / {2 * len(UNCONSTRAINED)} free "
                           f"perturbations of {delta}", tuple(col.failures))


CRITERIA: dict[int, Callable[[SuiteOptions], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}


def run_criterion(number: int, opts: SuiteOptions) -> CriterionResult:
    t0 = time.perf_counter()
    result = CRITERIA[number](opts)
    return replace(result, elapsed=time.perf_counter() - t0)


def run_all(opts: Optional[SuiteOptions] = None,
            report: Optional[Callable[[CriterionResult], None]] = None) -> list[CriterionResult]:
    opts = opts or SuiteOptions()
    results = []
    for number in CRITERIA:
        r = run_criterion(number, opts)
        if report is not None:
            report(r)
        results.append(r)
    return results
