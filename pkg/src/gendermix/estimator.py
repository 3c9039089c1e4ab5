"""Group gender-composition estimators built on a name reference table.

Per-name baselines:

* ``method0`` attributes each matched individual fractionally, by the
  reference conditional probabilities p(g|name);
* ``method1`` does the same but only for names whose larger conditional
  probability reaches a cutoff p_c (inclusive);
* ``method2`` hard-assigns every bearer of a name to the gender whose
  conditional probability strictly exceeds p_c.

The global estimator ``ggem`` instead models the group as a leaky-pipeline
draw from the reference population: each name's female odds are multiplied
by a single unknown ratio eta, and the group composition gamma is the value
that makes the transformed per-name expectations sum to a self-consistent
total. The defining residual

    R(gamma) = sum_s N(s) * (delta(s) - gamma*) /
               (1 - gamma* * delta(s) + (delta(s) - gamma*) * gamma)

with delta(s) = 2 p(female|s) - 1 is strictly decreasing in gamma, so the
root is found by bisection; when the residual never crosses zero the
estimate clamps to gamma = +/-1. ``gamma_star`` is the overall imbalance of
the reference population itself (0 for a balanced one).

Compositions are expressed interchangeably as a female/male ratio alpha in
[0, inf], a female fraction beta in [0, 1] or an imbalance
gamma = 2*beta - 1 in [-1, 1].
"""

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from ._fmt import dump_json
from .errors import EstimationError, InputError
from .reference import ReferenceTable, TargetList

METHOD_0 = "method0"
METHOD_1 = "method1"
METHOD_2 = "method2"
METHOD_GGEM = "ggem"
METHODS = (METHOD_0, METHOD_1, METHOD_2, METHOD_GGEM)

_METHOD_ALIASES = {
    "m0": METHOD_0,
    "m1": METHOD_1,
    "m2": METHOD_2,
    METHOD_0: METHOD_0,
    METHOD_1: METHOD_1,
    METHOD_2: METHOD_2,
    METHOD_GGEM: METHOD_GGEM,
}

# Bisection brackets start this far inside the open interval (-1, 1).
_BRACKET_MARGIN = 1e-9


@dataclass(frozen=True)
class GenderComposition:
    """One composition stated three ways: alpha, beta and gamma.

    Constructed through one of the ``from_*`` classmethods so the three
    parametrizations stay mutually consistent. ``alpha`` is +inf for an
    all-female group.
    """

    gamma: float
    beta: float
    alpha: float

    @classmethod
    def from_gamma(cls, gamma: float) -> "GenderComposition":
        gamma = _checked("gamma", gamma, -1.0, 1.0)
        beta = (1.0 + gamma) / 2.0
        alpha = math.inf if gamma == 1.0 else (1.0 + gamma) / (1.0 - gamma)
        return cls(gamma, beta, alpha)

    @classmethod
    def from_beta(cls, beta: float) -> "GenderComposition":
        beta = _checked("beta", beta, 0.0, 1.0)
        gamma = 2.0 * beta - 1.0
        alpha = math.inf if beta == 1.0 else beta / (1.0 - beta)
        return cls(gamma, beta, alpha)

    @classmethod
    def from_alpha(cls, alpha: float) -> "GenderComposition":
        if math.isnan(alpha) or alpha < 0.0:
            raise InputError(f"alpha must be in [0, inf], got {alpha!r}")
        if math.isinf(alpha):
            return cls(1.0, 1.0, math.inf)
        return cls((alpha - 1.0) / (alpha + 1.0), alpha / (1.0 + alpha), alpha)


def _checked(label: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if math.isnan(value) or not lo <= value <= hi:
        raise InputError(f"{label} must be in [{lo}, {hi}], got {value!r}")
    return value


def convert_composition(value: float, from_: str) -> GenderComposition:
    """Build a :class:`GenderComposition` from one named parametrization."""
    builders = {
        "alpha": GenderComposition.from_alpha,
        "beta": GenderComposition.from_beta,
        "gamma": GenderComposition.from_gamma,
    }
    if from_ not in builders:
        raise InputError(f"unknown composition axis {from_!r}")
    return builders[from_](value)


@dataclass(frozen=True)
class PipelineRatio:
    """Leaky-pipeline strength.

    ``eta`` is the female-to-male odds multiplier the pipeline applies to
    every name once the reference is debiased to gender balance; when the
    reference is already balanced (``gamma_star`` = 0, the default) it is
    simply the female/male survival-rate ratio. ``gamma_star`` is the
    overall imbalance of the reference population, strictly inside (-1, 1).
    """

    eta: float
    gamma_star: float = 0.0

    def __post_init__(self) -> None:
        if math.isnan(self.eta) or math.isinf(self.eta) or self.eta <= 0.0:
            raise InputError(f"eta must be finite and positive, got {self.eta!r}")
        if not -1.0 < self.gamma_star < 1.0:
            raise InputError(f"gamma_star must be strictly inside (-1, 1), got {self.gamma_star!r}")


def inclination(p_female: float) -> float:
    """Signed inclination 2*p - 1 of a conditional female probability."""
    return 2.0 * _checked("p_female", p_female, 0.0, 1.0) - 1.0


def _debias(p: float | np.ndarray, gamma_star: float):
    # Remove the reference's own imbalance: divide the female odds by
    # alpha* = (1 + gamma*) / (1 - gamma*).
    alpha_star = (1.0 + gamma_star) / (1.0 - gamma_star)
    return p / (p + alpha_star * (1.0 - p))


def transform_conditional(p_reference_female: float, pipeline: PipelineRatio) -> float:
    """Conditional female probability of a name inside the target group.

    Multiplies the name's female odds by ``pipeline.eta``:
    p_T = eta*p / (eta*p + (1-p)). With eta = 1 the input is returned
    unchanged, bit for bit. A nonzero ``gamma_star`` first maps the
    reference probability to its debiased (balanced-reference) form.
    """
    p = _checked("p_reference_female", p_reference_female, 0.0, 1.0)
    if pipeline.gamma_star != 0.0:
        p = _debias(p, pipeline.gamma_star)
    eta = pipeline.eta
    return eta * p / (eta * p + (1.0 - p))


class _Matched(NamedTuple):
    """Target names found in the reference, in sorted-key order."""

    names: list[str]
    counts: np.ndarray
    p_female: np.ndarray
    deltas: np.ndarray
    individuals: int | float


def _match(target: TargetList, reference: ReferenceTable) -> _Matched:
    names = [s for s in sorted(target.entries) if s in reference.entries]
    if not names:
        raise EstimationError("no target name appears in the reference")
    counts = np.array([target.entries[s] for s in names], dtype=float)
    p_female = np.array([reference.entries[s].p_female for s in names], dtype=float)
    deltas = 2.0 * p_female - 1.0
    individuals = sum(target.entries[s] for s in names)
    return _Matched(names, counts, p_female, deltas, individuals)


def residual(
    gamma: float,
    target: TargetList,
    reference: ReferenceTable,
    gamma_star: float = 0.0,
) -> float:
    """Self-consistency residual at an interior gamma.

    Zero exactly at the group composition implied by the pipeline model.
    Strictly decreasing in gamma whenever any matched name has
    delta != gamma_star; identically zero terms come from names with
    delta = gamma_star, adding such names never moves the root.
    """
    if not -1.0 < gamma < 1.0:
        raise InputError(f"gamma must be strictly inside (-1, 1), got {gamma!r}")
    if not -1.0 < gamma_star < 1.0:
        raise InputError(f"gamma_star must be strictly inside (-1, 1), got {gamma_star!r}")
    m = _match(target, reference)
    num = m.deltas - gamma_star
    den = 1.0 - gamma_star * m.deltas + num * gamma
    return float(np.sum(m.counts * num / den))


def _solve_gamma(
    counts: np.ndarray, deltas: np.ndarray, gamma_star: float, tol: float
) -> tuple[float, bool]:
    """Root of the residual on [-1, 1]; returns (gamma, clamped)."""
    num = deltas - gamma_star
    base = 1.0 - gamma_star * deltas

    def f(gamma: float) -> float:
        return float(np.sum(counts * num / (base + num * gamma)))

    if not np.any(num != 0.0):
        # All matched names sit exactly at the reference imbalance: the
        # residual is identically zero and gamma_star is the natural root.
        return gamma_star, False

    # One-sided limits at the endpoints. A delta = -1 name sends the
    # residual to -inf as gamma -> 1^- (its denominator vanishes), which
    # guarantees a crossing; symmetrically for delta = +1 at gamma -> -1^+.
    if np.any(deltas == -1.0):
        limit_hi = -math.inf
    else:
        limit_hi = float(np.sum(counts * num / ((1.0 + deltas) * (1.0 - gamma_star))))
    if np.any(deltas == 1.0):
        limit_lo = math.inf
    else:
        limit_lo = float(np.sum(counts * num / ((1.0 - deltas) * (1.0 + gamma_star))))

    if limit_hi > 0.0:
        return 1.0, True
    if limit_hi == 0.0:
        return 1.0, False
    if limit_lo < 0.0:
        return -1.0, True
    if limit_lo == 0.0:
        return -1.0, False

    lo = -(1.0 - _BRACKET_MARGIN)
    hi = 1.0 - _BRACKET_MARGIN
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, False
    if fhi == 0.0:
        return hi, False
    if flo < 0.0:
        # Root hides between -1 and the standard bracket: creep toward the
        # pole until the sign flips (a delta = +1 name guarantees it will).
        hi, t = lo, _BRACKET_MARGIN
        while t > 4e-17:
            t /= 4.0
            lo = -(1.0 - t)
            if f(lo) > 0.0:
                break
            hi = lo
        else:
            return hi, False
    elif fhi > 0.0:
        lo, t = hi, _BRACKET_MARGIN
        while t > 4e-17:
            t /= 4.0
            hi = 1.0 - t
            if f(hi) < 0.0:
                break
            lo = hi
        else:
            return lo, False

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm > 0.0:
            lo = mid
        elif fm < 0.0:
            hi = mid
        else:
            return mid, False
    return 0.5 * (lo + hi), False


def _target_probabilities(
    p_female: np.ndarray, gamma: float, gamma_star: float
) -> np.ndarray:
    """Per-name conditional female probabilities inside a group of
    composition ``gamma`` drawn from a reference of imbalance ``gamma_star``."""
    if gamma == 1.0:
        return np.where(p_female > 0.0, 1.0, 0.0)
    if gamma == -1.0:
        return np.where(p_female < 1.0, 0.0, 1.0)
    p = _debias(p_female, gamma_star) if gamma_star != 0.0 else p_female
    alpha = (1.0 + gamma) / (1.0 - gamma)
    return alpha * p / (alpha * p + (1.0 - p))


@dataclass(frozen=True)
class BootstrapInterval:
    """Percentile interval on beta from multinomial resampling."""

    low: float
    high: float
    repeats: int
    seed: int
    degenerate: int = 0


@dataclass(frozen=True)
class EstimateReport:
    """Everything one estimation run reports.

    ``attributed_female``/``attributed_male`` are real-valued attributed
    individual counts; the ``individuals_*``/``unique_names_*`` fields
    describe how much of the target the reference covered and how much the
    method actually used.
    """

    method: str
    cutoff: float | None
    composition: GenderComposition
    attributed_female: float
    attributed_male: float
    individuals_total: int | float
    individuals_matched: int | float
    individuals_used: int | float
    unique_names_total: int
    unique_names_matched: int
    clamped: bool = False
    bootstrap_interval: BootstrapInterval | None = None

    def to_dict(self) -> dict:
        bootstrap = None
        if self.bootstrap_interval is not None:
            bootstrap = {
                "low": self.bootstrap_interval.low,
                "high": self.bootstrap_interval.high,
                "repeats": self.bootstrap_interval.repeats,
                "seed": self.bootstrap_interval.seed,
                "degenerate": self.bootstrap_interval.degenerate,
            }
        return {
            "method": self.method,
            "cutoff": self.cutoff,
            "alpha": self.composition.alpha,
            "beta": self.composition.beta,
            "gamma": self.composition.gamma,
            "clamped": self.clamped,
            "attributed_female": self.attributed_female,
            "attributed_male": self.attributed_male,
            "coverage": {
                "individuals_total": self.individuals_total,
                "individuals_matched": self.individuals_matched,
                "individuals_used": self.individuals_used,
                "unique_names_total": self.unique_names_total,
                "unique_names_matched": self.unique_names_matched,
            },
            "bootstrap": bootstrap,
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())


def _report(
    method: str,
    cutoff: float | None,
    composition: GenderComposition,
    female: float,
    male: float,
    target: TargetList,
    matched: _Matched,
    individuals_used: int | float,
    clamped: bool = False,
) -> EstimateReport:
    return EstimateReport(
        method=method,
        cutoff=cutoff,
        composition=composition,
        attributed_female=female,
        attributed_male=male,
        individuals_total=target.total_individuals,
        individuals_matched=matched.individuals,
        individuals_used=individuals_used,
        unique_names_total=len(target.entries),
        unique_names_matched=len(matched.names),
        clamped=clamped,
    )


def estimate_method0(target: TargetList, reference: ReferenceTable) -> EstimateReport:
    """Fractional attribution: every matched individual contributes
    p(g|name) to each gender."""
    m = _match(target, reference)
    female = float(np.sum(m.p_female * m.counts))
    male = float(np.sum((1.0 - m.p_female) * m.counts))
    comp = GenderComposition.from_beta(female / (female + male))
    return _report(METHOD_0, None, comp, female, male, target, m, m.individuals)


def estimate_method1(
    target: TargetList, reference: ReferenceTable, p_c: float
) -> EstimateReport:
    """Fractional attribution restricted to names whose larger conditional
    probability reaches ``p_c`` (inclusive). At p_c = 0.5 every matched
    name qualifies and the result coincides with method0."""
    p_c = _checked("p_c", p_c, 0.5, 1.0)
    m = _match(target, reference)
    mask = np.maximum(m.p_female, 1.0 - m.p_female) >= p_c
    if not np.any(mask):
        raise EstimationError(f"no names pass cutoff p_c={p_c:g}")
    female = float(np.sum(np.where(mask, m.p_female * m.counts, 0.0)))
    male = float(np.sum(np.where(mask, (1.0 - m.p_female) * m.counts, 0.0)))
    used = sum(target.entries[s] for s, keep in zip(m.names, mask) if keep)
    comp = GenderComposition.from_beta(female / (female + male))
    return _report(METHOD_1, p_c, comp, female, male, target, m, used)


def estimate_method2(
    target: TargetList, reference: ReferenceTable, p_c: float
) -> EstimateReport:
    """Hard assignment: all bearers of a name go to the gender whose
    conditional probability strictly exceeds ``p_c``; other names are
    excluded. Since p_c >= 0.5 the assignment is unique."""
    p_c = _checked("p_c", p_c, 0.5, 1.0)
    m = _match(target, reference)
    female_mask = m.p_female > p_c
    male_mask = (1.0 - m.p_female) > p_c
    if not np.any(female_mask | male_mask):
        raise EstimationError(f"no names pass cutoff p_c={p_c:g}")
    female = float(np.sum(np.where(female_mask, m.counts, 0.0)))
    male = float(np.sum(np.where(male_mask, m.counts, 0.0)))
    used = sum(
        target.entries[s]
        for s, keep in zip(m.names, female_mask | male_mask)
        if keep
    )
    comp = GenderComposition.from_beta(female / (female + male))
    return _report(METHOD_2, p_c, comp, female, male, target, m, used)


def solve_ggem(
    target: TargetList,
    reference: ReferenceTable,
    gamma_star: float = 0.0,
    tol: float = 1e-12,
) -> EstimateReport:
    """Solve the self-consistency condition for the group composition.

    Bisection on gamma with absolute tolerance ``tol``; endpoints are
    handled through the residual's one-sided limits, and a residual that
    never crosses zero clamps the estimate to gamma = +/-1 (reported via
    ``clamped``). Attributed counts are the real-valued sums of the
    transformed per-name probabilities at the solved gamma.
    """
    if not -1.0 < gamma_star < 1.0:
        raise InputError(f"gamma_star must be strictly inside (-1, 1), got {gamma_star!r}")
    if not tol > 0.0:
        raise InputError(f"tol must be positive, got {tol!r}")
    m = _match(target, reference)
    gamma, clamped = _solve_gamma(m.counts, m.deltas, gamma_star, tol)
    p_target = _target_probabilities(m.p_female, gamma, gamma_star)
    female = float(np.sum(p_target * m.counts))
    male = float(np.sum((1.0 - p_target) * m.counts))
    comp = GenderComposition.from_gamma(gamma)
    return _report(
        METHOD_GGEM, None, comp, female, male, target, m, m.individuals, clamped
    )


class PartialContribution(NamedTuple):
    """Composition contributed by names in one |delta| bin.

    ``beta_partial`` is None for an empty bin.
    """

    low: float
    high: float
    beta_partial: float | None
    individuals: int | float


def default_bin_edges(n_bins: int = 10) -> list[float]:
    """Equal-width |delta| bin edges spanning [0, 1]."""
    if n_bins < 1:
        raise InputError("n_bins must be at least 1")
    return [i / n_bins for i in range(n_bins + 1)]


def partial_contributions(
    target: TargetList,
    reference: ReferenceTable,
    bin_edges: list[float] | None = None,
    method: str = METHOD_0,
    gamma_star: float = 0.0,
) -> list[PartialContribution]:
    """Split the attributed composition by reference |delta| bins.

    Bins are half-open [lo, hi) except the last, which includes 1. For
    ``method0`` the per-name probability is the raw reference conditional;
    for ``ggem`` it is the transformed probability at the solved gamma of
    the full target.
    """
    edges = default_bin_edges() if bin_edges is None else [float(e) for e in bin_edges]
    if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise InputError("bin edges must be strictly increasing")
    if edges[0] != 0.0 or edges[-1] != 1.0:
        raise InputError("bin edges must span [0, 1]")
    if method not in (METHOD_0, METHOD_GGEM):
        raise InputError(f"partial contributions support method0 or ggem, got {method!r}")
    m = _match(target, reference)
    if method == METHOD_GGEM:
        solved = solve_ggem(target, reference, gamma_star=gamma_star)
        probs = _target_probabilities(m.p_female, solved.composition.gamma, gamma_star)
    else:
        probs = m.p_female
    edge_array = np.array(edges)
    idx = np.searchsorted(edge_array, np.abs(m.deltas), side="right") - 1
    idx = np.minimum(idx, len(edges) - 2)  # |delta| = 1 lands in the last bin
    rows: list[PartialContribution] = []
    for b in range(len(edges) - 1):
        members = [i for i in range(len(m.names)) if idx[i] == b]
        individuals = sum(target.entries[m.names[i]] for i in members)
        if individuals > 0:
            female = float(np.sum(probs[members] * m.counts[members]))
            total = float(np.sum(m.counts[members]))
            beta_partial: float | None = female / total
        else:
            beta_partial = None
        rows.append(PartialContribution(edges[b], edges[b + 1], beta_partial, individuals))
    return rows


@dataclass(frozen=True)
class MethodSpec:
    """A runnable estimator choice: method name plus its parameters."""

    method: str
    cutoff: float | None = None
    gamma_star: float = 0.0

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        if self.method in (METHOD_1, METHOD_2):
            if self.cutoff is None:
                raise InputError(f"{self.method} requires a cutoff")
        elif self.cutoff is not None:
            raise InputError(f"{self.method} takes no cutoff")

    @classmethod
    def parse(cls, text: str, gamma_star: float = 0.0) -> "MethodSpec":
        """Parse compact notation: ``m0``, ``m1:0.9``, ``method2:0.7``, ``ggem``."""
        name, _, cutoff_text = text.strip().partition(":")
        method = _METHOD_ALIASES.get(name.lower())
        if method is None:
            raise InputError(f"unknown method {name!r}")
        cutoff = None
        if cutoff_text:
            try:
                cutoff = float(cutoff_text)
            except ValueError:
                raise InputError(f"bad cutoff {cutoff_text!r} in method spec {text!r}")
        return cls(method, cutoff, gamma_star if method == METHOD_GGEM else 0.0)

    def run(self, target: TargetList, reference: ReferenceTable) -> EstimateReport:
        if self.method == METHOD_0:
            return estimate_method0(target, reference)
        if self.method == METHOD_1:
            return estimate_method1(target, reference, self.cutoff)
        if self.method == METHOD_2:
            return estimate_method2(target, reference, self.cutoff)
        return solve_ggem(target, reference, gamma_star=self.gamma_star)

    def label(self) -> str:
        if self.cutoff is None:
            return self.method
        return f"{self.method}:{self.cutoff:g}"


def bootstrap_interval(
    target: TargetList,
    reference: ReferenceTable,
    method_spec: MethodSpec,
    repeats: int = 1000,
    seed: int = 0,
) -> BootstrapInterval:
    """2.5/97.5 percentile interval on beta from resampled targets.

    Each repeat redraws the target's individuals (one multinomial over the
    name counts with the same total) and re-runs the estimator; the random
    stream of repeat ``r`` is derived from ``(seed, r)`` alone, so any
    subset of repeats is reproducible. Degenerate resamples, where the
    estimator has no usable names, are counted and skipped, never fatal.
    """
    if repeats < 100:
        raise InputError("bootstrap needs at least 100 repeats")
    if not isinstance(seed, int) or seed < 0:
        raise InputError(f"seed must be a nonnegative integer, got {seed!r}")
    names = sorted(target.entries)
    counts = [target.entries[s] for s in names]
    if any(not isinstance(c, int) for c in counts):
        raise InputError("bootstrap requires integer target counts")
    total = sum(counts)
    pvals = np.array(counts, dtype=float) / total
    betas: list[float] = []
    degenerate = 0
    for r in range(repeats):
        rng = np.random.default_rng([seed, r])
        sample = rng.multinomial(total, pvals)
        entries = {s: int(c) for s, c in zip(names, sample) if c > 0}
        try:
            report = method_spec.run(TargetList(entries), reference)
        except EstimationError:
            degenerate += 1
            continue
        betas.append(report.composition.beta)
    if not betas:
        raise EstimationError("every bootstrap resample was degenerate")
    low, high = np.percentile(betas, [2.5, 97.5])
    return BootstrapInterval(float(low), float(high), repeats, seed, degenerate)


def with_bootstrap(report: EstimateReport, interval: BootstrapInterval) -> EstimateReport:
    """Return a copy of ``report`` carrying a bootstrap interval."""
    return replace(report, bootstrap_interval=interval)
