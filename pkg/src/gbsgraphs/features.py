"""Event and orbit feature vectors, analytic and sampled, with optional loss.

An event (k, n_max) collects every pattern with total k and no mode above
n_max; an orbit is the nonincreasing multiset of nonzero counts, i.e. the
pattern up to mode permutation.  Feature vectors list probabilities of chosen
events or orbits and come in two provenances: ``sampled`` (frequencies from a
shot list) and ``analytic`` (exact sums over the truncated table or the
closed-form pair-number law, thinned per mode when a loss model is given).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import engine, graphs
from .embedding import EmbeddingSpec
from .engine import DEFAULT_CUTOFF_PAIRS, LossModel, ProbabilityTable, SampleSet
from .errors import ValidationError

#: Event totals the analysis defaults to (odd totals vanish without loss).
DEFAULT_EVENTS = (2, 4, 6, 8)

#: Default per-mode cap when collecting events.
DEFAULT_MAX_PER_MODE = 8

#: Orbits used for the three-coordinate graph representation.
DEFAULT_ORBITS = ((1, 1, 1), (1, 1, 1, 1), (2, 1, 1))

#: Analytic values below this give meaningless relative deviations.
DEVIATION_FLOOR = 1e-12


class EventSpec(NamedTuple):
    k: int
    n_max: int


OrbitId = tuple[int, ...]


def orbit_of(pattern) -> OrbitId:
    """Nonzero counts sorted nonincreasing; the empty tuple for vacuum."""
    arr = engine.validate_pattern(pattern)
    return tuple(sorted((int(c) for c in arr if c > 0), reverse=True))


def event_of(pattern, n_max: int) -> int | None:
    """Total count if every mode stays within ``n_max``, else None."""
    if n_max < 1:
        raise ValidationError(f"n_max must be >= 1, got {n_max}")
    arr = engine.validate_pattern(pattern)
    if (arr > n_max).any():
        return None
    return int(arr.sum())


def validate_orbit(orbit) -> OrbitId:
    orbit = tuple(int(x) for x in orbit)
    if len(orbit) > graphs.N_NODES:
        raise ValidationError(f"orbit {orbit} has more than {graphs.N_NODES} parts")
    if any(x <= 0 for x in orbit):
        raise ValidationError(f"orbit parts must be positive, got {orbit}")
    if any(a < b for a, b in zip(orbit, orbit[1:])):
        raise ValidationError(f"orbit parts must be nonincreasing, got {orbit}")
    return orbit


def orbit_patterns(orbit) -> np.ndarray:
    """All distinct patterns in the orbit, as an (n, 8) array."""
    orbit = validate_orbit(orbit)
    padded = orbit + (0,) * (graphs.N_NODES - len(orbit))
    distinct = sorted(set(itertools.permutations(padded)))
    return np.array(distinct, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Probabilities for an ordered list of event or orbit labels."""

    labels: tuple
    values: np.ndarray
    provenance: str               # "sampled" | "analytic"
    loss_eta: float
    stat_error: np.ndarray | None = None   # binomial, sampled only
    tail_bound: np.ndarray | None = None   # truncation bound, analytic only


def format_label(label) -> str:
    if isinstance(label, EventSpec):
        return f"event(k={label.k},nmax={label.n_max})"
    return "orbit(" + ",".join(str(x) for x in label) + ")"


# ---------------------------------------------------------------------------
# Sampled feature vectors
# ---------------------------------------------------------------------------

def _sampled_meta_eta(samples: SampleSet) -> float:
    return samples.meta.loss if samples.meta.loss is not None else 1.0


def fv_events_from_samples(samples: SampleSet, events: Sequence[int],
                           n_max: int = DEFAULT_MAX_PER_MODE) -> FeatureVector:
    """Fraction of shots landing in each event (k, n_max)."""
    if len(samples) == 0:
        raise ValidationError("cannot build a feature vector from zero shots")
    if n_max < 1:
        raise ValidationError(f"n_max must be >= 1, got {n_max}")
    shots = samples.shots
    totals = shots.sum(axis=1)
    capped = (shots <= n_max).all(axis=1)
    n = len(samples)
    values = np.array([float(np.count_nonzero((totals == k) & capped)) / n
                       for k in events])
    return FeatureVector(
        labels=tuple(EventSpec(int(k), n_max) for k in events),
        values=values,
        provenance="sampled",
        loss_eta=_sampled_meta_eta(samples),
        stat_error=np.sqrt(values * (1.0 - values) / n),
    )


def fv_orbits_from_samples(samples: SampleSet,
                           orbits: Sequence[OrbitId]) -> FeatureVector:
    """Fraction of shots whose count multiset equals each orbit."""
    if len(samples) == 0:
        raise ValidationError("cannot build a feature vector from zero shots")
    orbits = [validate_orbit(o) for o in orbits]
    sorted_desc = -np.sort(-samples.shots, axis=1)
    n = len(samples)
    values = []
    for orbit in orbits:
        padded = np.array(orbit + (0,) * (graphs.N_NODES - len(orbit)))
        values.append(float(np.count_nonzero((sorted_desc == padded).all(axis=1))) / n)
    values = np.array(values)
    return FeatureVector(
        labels=tuple(orbits),
        values=values,
        provenance="sampled",
        loss_eta=_sampled_meta_eta(samples),
        stat_error=np.sqrt(values * (1.0 - values) / n),
    )


# ---------------------------------------------------------------------------
# Analytic feature vectors
# ---------------------------------------------------------------------------

def _binomial_pmf_matrix(t_max: int, k_max: int, eta: float) -> np.ndarray:
    """pmf[t, k] = C(t, k) eta^k (1-eta)^(t-k); zero above the diagonal."""
    pmf = np.zeros((t_max + 1, k_max + 1))
    for t in range(t_max + 1):
        for k in range(min(t, k_max) + 1):
            pmf[t, k] = math.comb(t, k) * eta ** k * (1.0 - eta) ** (t - k)
    return pmf


def _thinned_pattern_mass(table: ProbabilityTable, detected: np.ndarray,
                          eta: float) -> np.ndarray:
    """For each detected pattern, its probability after per-mode thinning.

    Sums P_ideal(t) * prod_j Binom(detected_j; t_j, eta) over the table.
    """
    if len(detected) == 0:
        return np.zeros(0)
    pats = table.patterns
    t_max = int(pats.max(initial=0))
    k_max = int(detected.max(initial=0))
    pmf = _binomial_pmf_matrix(t_max, max(t_max, k_max), eta)
    out = np.zeros(len(detected))
    chunk = 128
    for lo in range(0, len(detected), chunk):
        block = detected[lo:lo + chunk]
        w = np.ones((len(pats), len(block)))
        for j in range(graphs.N_NODES):
            w *= pmf[pats[:, j][:, None], block[None, :, j]]
        out[lo:lo + chunk] = table.probs @ w
    return out


def _compositions_capped(total: int, parts: int, cap: int):
    """All nonnegative integer vectors of the given length, sum, and cap."""
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions_capped(total - first, parts - 1, cap):
            yield (first,) + rest


def _event_member_patterns(k: int, n_max: int) -> np.ndarray:
    members = list(_compositions_capped(k, graphs.N_NODES, n_max))
    return np.array(members, dtype=np.int64).reshape(len(members), graphs.N_NODES)


def fv_events_analytic(spec: EmbeddingSpec, events: Sequence[int],
                       n_max: int = DEFAULT_MAX_PER_MODE,
                       loss: LossModel | None = None,
                       cutoff_pairs: int = DEFAULT_CUTOFF_PAIRS) -> FeatureVector:
    """Exact event probabilities, truncated at ``cutoff_pairs`` pairs.

    With the cap inactive (n_max >= k) the total-count law applies directly:
    lossless events are the pair-number probabilities on even totals, and a
    loss model binomially redistributes each ideal total.  A binding cap
    falls back to enumeration over the thinned table.  The reported
    tail_bound is the truncated ideal mass, an upper bound on the error.
    """
    if n_max < 1:
        raise ValidationError(f"n_max must be >= 1, got {n_max}")
    eta = 1.0 if loss is None else loss.eta
    events = [int(k) for k in events]
    if any(k < 0 for k in events):
        raise ValidationError("event totals must be nonnegative")
    if any(k > 2 * cutoff_pairs for k in events):
        raise ValidationError(
            f"event totals beyond 2*cutoff_pairs={2 * cutoff_pairs} are all tail")
    tail = engine.total_photon_tail(spec.rank, cutoff_pairs)

    table = None
    values, bounds = [], []
    for k in events:
        if n_max >= k:
            if eta == 1.0:
                value = (engine.total_photon_distribution(spec.rank, k // 2)
                         if k % 2 == 0 else 0.0)
                bound = 0.0
            else:
                value = math.fsum(
                    engine.total_photon_distribution(spec.rank, pairs)
                    * math.comb(2 * pairs, k)
                    * eta ** k * (1.0 - eta) ** (2 * pairs - k)
                    for pairs in range((k + 1) // 2, cutoff_pairs + 1))
                bound = tail
        else:
            if table is None:
                table = engine.build_table(spec, cutoff_pairs)
            members = _event_member_patterns(k, n_max)
            value = float(_thinned_pattern_mass(table, members, eta).sum())
            bound = tail
        values.append(value)
        bounds.append(bound)
    return FeatureVector(
        labels=tuple(EventSpec(k, n_max) for k in events),
        values=np.array(values),
        provenance="analytic",
        loss_eta=eta,
        tail_bound=np.array(bounds),
    )


def fv_orbits_analytic(spec: EmbeddingSpec, orbits: Sequence[OrbitId],
                       loss: LossModel | None = None,
                       cutoff_pairs: int = DEFAULT_CUTOFF_PAIRS) -> FeatureVector:
    """Exact orbit probabilities from the truncated table.

    Without loss this sums table entries over the orbit; with loss each ideal
    pattern is convolved with per-mode binomial thinning onto the orbit's
    member patterns.
    """
    eta = 1.0 if loss is None else loss.eta
    orbits = [validate_orbit(o) for o in orbits]
    table = engine.build_table(spec, cutoff_pairs)
    tail = engine.total_photon_tail(spec.rank, cutoff_pairs)
    values = []
    if eta == 1.0:
        by_orbit: dict[OrbitId, float] = {}
        for pattern, prob in zip(table.patterns, table.probs):
            key = tuple(sorted((int(c) for c in pattern if c > 0), reverse=True))
            by_orbit[key] = by_orbit.get(key, 0.0) + prob
        values = [by_orbit.get(o, 0.0) for o in orbits]
    else:
        for orbit in orbits:
            members = orbit_patterns(orbit)
            values.append(float(_thinned_pattern_mass(table, members, eta).sum()))
    return FeatureVector(
        labels=tuple(orbits),
        values=np.array(values),
        provenance="analytic",
        loss_eta=eta,
        tail_bound=np.full(len(orbits), tail),
    )


# ---------------------------------------------------------------------------
# Loss-sweep deviation curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DeviationCurve:
    """Relative deviation of a sampled FV from theory across a loss sweep."""

    loss_factors: np.ndarray      # strictly increasing, in [0, 1]
    deviations: np.ndarray        # (grid, components); NaN where undefined
    defined: np.ndarray           # bool mask matching deviations
    labels: tuple


def _require_sampled_events(sampled: FeatureVector) -> None:
    if sampled.provenance != "sampled":
        raise ValidationError("deviation curves need a sampled feature vector")
    if not all(isinstance(lbl, EventSpec) for lbl in sampled.labels):
        raise ValidationError("deviation curves are defined for event labels")


def relative_deviation(sampled: FeatureVector, spec: EmbeddingSpec,
                       transmissions: Sequence[float],
                       cutoff_pairs: int = DEFAULT_CUTOFF_PAIRS) -> DeviationCurve:
    """(sampled - theory(eta)) / theory(eta) per component over an eta grid.

    Rows are ordered by increasing loss factor 1 - eta.  Components whose
    analytic value sits below ``DEVIATION_FLOOR`` are undefined (NaN) at that
    grid point; consumers must skip them.
    """
    _require_sampled_events(sampled)
    etas = sorted(set(float(e) for e in transmissions), reverse=True)
    if not etas:
        raise ValidationError("empty transmission grid")
    if etas[0] > 1.0 or etas[-1] < 0.0:
        raise ValidationError("transmissions must lie in [0, 1]")
    events = [lbl.k for lbl in sampled.labels]
    n_max = sampled.labels[0].n_max
    rows, mask = [], []
    for eta in etas:
        theory = fv_events_analytic(spec, events, n_max,
                                    LossModel(eta), cutoff_pairs)
        defined = theory.values >= DEVIATION_FLOOR
        row = np.where(defined,
                       (sampled.values - theory.values)
                       / np.where(defined, theory.values, 1.0),
                       np.nan)
        rows.append(row)
        mask.append(defined)
    return DeviationCurve(
        loss_factors=np.array([1.0 - e for e in etas]),
        deviations=np.array(rows),
        defined=np.array(mask),
        labels=sampled.labels,
    )


def match_loss(sampled: FeatureVector, spec: EmbeddingSpec,
               component_index: int, step: float = 0.01,
               tol: float = 1e-4,
               cutoff_pairs: int = DEFAULT_CUTOFF_PAIRS) -> float | None:
    """Loss factor where one component's deviation changes sign.

    Scans a loss-factor grid for a sign change of sampled - theory, then
    bisects the bracketing interval down to ``tol``.  Returns None when the
    grid shows no sign change.
    """
    _require_sampled_events(sampled)
    if not 0 <= component_index < len(sampled.labels):
        raise ValidationError(f"component index {component_index} out of range")
    label = sampled.labels[component_index]
    target = float(sampled.values[component_index])

    def residual(loss_factor: float) -> float:
        theory = fv_events_analytic(spec, [label.k], label.n_max,
                                    LossModel(1.0 - loss_factor), cutoff_pairs)
        return target - float(theory.values[0])

    grid = [min(float(x), 1.0) for x in np.arange(0.0, 1.0 + step / 2, step)]
    res = [residual(x) for x in grid]
    bracket = None
    for a, b, ra, rb in zip(grid, grid[1:], res, res[1:]):
        if ra == 0.0:
            return a
        if ra * rb < 0.0:
            bracket = (a, b, ra)
            break
    if bracket is None:
        return grid[-1] if res[-1] == 0.0 else None
    lo, hi, rlo = bracket
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        rmid = residual(mid)
        if rmid == 0.0:
            return mid
        if rlo * rmid < 0.0:
            hi = mid
        else:
            lo, rlo = mid, rmid
    return 0.5 * (lo + hi)
