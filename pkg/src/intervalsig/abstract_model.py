"""Congestion dynamics over abstract actions.

Agents of each risk type read the published per-action interval through
their endpoint weight, pile their whole mass onto a minimizing action
(uniformly among ties), and realized costs feed the next signal. Includes
the coupled-trajectory convergence check (two runs driven by identical
draws from different initial signals) and the two-arm flapping
construction whose scalar arm oscillates while its interval arm holds a
near-even split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ks_2samp

from .assignment import edge_weight
from .costs import (
    AbstractCostFn,
    ValidationError,
    flapping_cost_fn,
    linear_cost_fn,
    social_cost_abstract,
)
from .population import (
    PopulationProfile,
    RenewalProcess,
    TypeSet,
    derived_rng,
    finite_support,
    sample_profile,
)
from .signaling import CostHistory, Scheme, full_extreme_scheme

__all__ = [
    "AbstractConfig",
    "AbstractRecord",
    "AbstractState",
    "ConvergenceReport",
    "FlappingReport",
    "FlappingSpec",
    "ValidationError",
    "convergence_check",
    "convergence_demo_config",
    "flapping_cost",
    "flapping_demo",
    "new_state",
    "records_to_abstract_csv",
    "run_abstract",
    "step_abstract",
]


@dataclass(frozen=True, eq=False)
class AbstractConfig:
    """One abstract-model scenario: population, actions, costs, scheme."""

    agent_count: int
    action_count: int
    costs: list[AbstractCostFn]
    scheme: Scheme
    renewal: RenewalProcess
    initial_signal: np.ndarray
    seed: int
    types: TypeSet = TypeSet((0.5,))

    def __post_init__(self):
        if self.agent_count < 1:
            raise ValidationError("agent count must be >= 1")
        if self.action_count < 1:
            raise ValidationError("need at least one action")
        if len(self.costs) != self.action_count:
            raise ValidationError(
                f"{len(self.costs)} cost functions for "
                f"{self.action_count} actions")
        signal = np.asarray(self.initial_signal, dtype=float)
        if signal.shape != (self.action_count, 2):
            raise ValidationError(
                f"initial signal shape {signal.shape} != "
                f"({self.action_count}, 2)")
        if np.any(signal[:, 0] > signal[:, 1]):
            raise ValidationError(
                "initial signal must satisfy lower <= upper per action")
        object.__setattr__(self, "initial_signal", signal)
        if (self.renewal.kind == "uniform_perturbation"
                and self.renewal.type_count != len(self.types)):
            raise ValidationError("renewal type count != type set size")
        if self.renewal.kind == "finite_support":
            for profile, _ in self.renewal.atoms:
                if len(profile.weights) != len(self.types):
                    raise ValidationError(
                        "renewal atom width != type set size")


@dataclass
class AbstractState:
    """Evolving per-run state: current signal plus the cost history."""

    t: int
    signal: np.ndarray
    history: CostHistory


@dataclass
class AbstractRecord:
    """One period: the signal agents saw, their counts, realized costs."""

    t: int
    counts: np.ndarray
    costs: np.ndarray
    social_cost: float
    signal: np.ndarray = field(repr=False)


def new_state(config: AbstractConfig) -> AbstractState:
    return AbstractState(
        t=1,
        signal=config.initial_signal.copy(),
        history=CostHistory(config.action_count,
                            window=config.scheme.history_window()),
    )


def _pick_among_ties(weights: np.ndarray, u: float) -> int:
    """Index of a minimal entry, the tie chosen by the uniform draw."""
    ties = np.flatnonzero(weights == weights.min())
    return int(ties[min(int(u * len(ties)), len(ties) - 1)])


def _windowed_envelope(history: CostHistory, window: int,
                       initial_signal: np.ndarray) -> np.ndarray:
    """Min/max over the recent window; the initial signal participates
    as a pseudo-observation until the window fills with real costs."""
    m_count = history.m_count
    signal = np.empty((m_count, 2))
    for m in range(m_count):
        if history.count(m) == 0:
            signal[m] = initial_signal[m]
            continue
        lo, hi = history.window_extremes(m, window)
        if history.count(m) < window:
            lo = min(lo, initial_signal[m, 0])
            hi = max(hi, initial_signal[m, 1])
        signal[m] = (lo, hi)
    return signal


def _next_signal(state: AbstractState, config: AbstractConfig,
                 costs: np.ndarray) -> np.ndarray:
    scheme = config.scheme
    if scheme.kind == "now":
        return np.column_stack([costs, costs])
    if scheme.kind == "mean":
        means = np.array([state.history.running_mean(m)
                          for m in range(config.action_count)])
        return np.column_stack([means, means])
    if scheme.kind == "full_extreme":
        return np.column_stack([np.minimum(state.signal[:, 0], costs),
                                np.maximum(state.signal[:, 1], costs)])
    signal = _windowed_envelope(state.history, scheme.window,
                                config.initial_signal)
    if scheme.kind == "subinterval" and scheme.shrink != 1.0:
        mid = signal.mean(axis=1)
        half = scheme.shrink * (signal[:, 1] - signal[:, 0]) / 2.0
        signal[:, 0] = mid - half
        signal[:, 1] = mid + half
    return signal


def step_abstract(state: AbstractState, config: AbstractConfig,
                  profile: PopulationProfile,
                  tie_uniforms: np.ndarray) -> AbstractRecord:
    """Advance one period under explicit randomness.

    The profile and one uniform per type are passed in (rather than an
    rng) so coupled trajectories can share draws exactly; a type's
    uniform is consumed only if that type actually ties.
    """
    if len(profile.weights) != len(config.types):
        raise ValidationError("profile width != type set size")
    if len(tie_uniforms) != len(config.types):
        raise ValidationError("need one tie-break uniform per type")

    counts = np.zeros(config.action_count)
    for omega, share, u in zip(config.types.omegas, profile.weights,
                               tie_uniforms):
        weights = edge_weight(state.signal, omega)
        counts[_pick_among_ties(weights, u)] += share * config.agent_count

    costs = np.array([fn(counts[m]) for m, fn in enumerate(config.costs)])
    social = social_cost_abstract(counts, config.costs, config.agent_count)
    state.history.record_period(costs)
    record = AbstractRecord(state.t, counts, costs, social,
                            state.signal.copy())
    state.signal = _next_signal(state, config, costs)
    state.t += 1
    return record


def run_abstract(config: AbstractConfig, horizon: int) -> list[AbstractRecord]:
    """Simulate ``horizon`` periods; deterministic given ``config.seed``."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    state = new_state(config)
    pop_rng = derived_rng(config.seed, "population")
    tie_rng = derived_rng(config.seed, "tie-break")
    records = []
    for _ in range(horizon):
        profile = sample_profile(config.renewal, pop_rng)
        records.append(step_abstract(state, config, profile,
                                     tie_rng.random(len(config.types))))
    return records


def records_to_abstract_csv(records: list[AbstractRecord]) -> str:
    if not records:
        raise ValidationError("cannot serialize an empty run")
    m = len(records[0].counts)
    header = (["t"]
              + [f"n_{i}" for i in range(1, m + 1)]
              + [f"ulo_{i}" for i in range(1, m + 1)]
              + [f"uhi_{i}" for i in range(1, m + 1)]
              + ["social_cost"])
    lines = [",".join(header)]
    for rec in records:
        cells = [str(rec.t)]
        for block in (rec.counts, rec.signal[:, 0], rec.signal[:, 1]):
            cells.extend("%.17g" % v for v in block)
        cells.append("%.17g" % rec.social_cost)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Flapping construction: scalar signaling pays a per-period premium that an
# interval scheme avoids by keeping the population split.

@dataclass(frozen=True)
class FlappingSpec:
    """Cost-shape parameters: the premium approaches ``gap_target`` as the
    (odd) agent count grows."""

    gap_target: float
    agent_count: int

    def __post_init__(self):
        if self.gap_target <= 0:
            raise ValidationError("gap target must be > 0")
        if self.agent_count < 3 or self.agent_count % 2 == 0:
            raise ValidationError("agent count must be odd and >= 3")


def flapping_cost(spec: FlappingSpec) -> AbstractCostFn:
    """Piecewise cost used by both actions: flat at 1 below the majority
    threshold, then exponential in the share above it."""
    return flapping_cost_fn(spec.gap_target, spec.agent_count)


@dataclass
class FlappingReport:
    scalar_records: list[AbstractRecord]
    interval_records: list[AbstractRecord]
    scalar_costs: np.ndarray
    interval_costs: np.ndarray
    gap: float
    gap_lower_bound: float


def flapping_demo(spec: FlappingSpec, horizon: int,
                  seed: int = 0) -> FlappingReport:
    """Run the two arms of the construction side by side.

    Scalar arm: point signaling with a single deterministic type; the
    whole population chases last period's cheaper action, so congestion
    alternates all-or-nothing and every period pays the maximal cost.
    Interval arm: a two-period envelope seeded at the near-even split;
    the emitted signal ties both actions every period (asserted), and the
    counts alternate within the split orbit, paying the near-minimal
    cost. The gap between the two steady per-period costs approaches
    ``gap_target`` from below as the population grows.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    n = spec.agent_count
    fn = flapping_cost(spec)

    scalar_config = AbstractConfig(
        agent_count=n,
        action_count=2,
        costs=[fn, fn],
        scheme=Scheme("now"),
        renewal=finite_support([(PopulationProfile((1.0,)), 1.0)]),
        initial_signal=np.zeros((2, 2)),
        seed=seed,
        types=TypeSet((0.5,)),
    )
    scalar_records = run_abstract(scalar_config, horizon)

    # Interval arm: the construction premises the near-even split, which
    # a single atomic type cannot reach on its own; the counts are seeded
    # and alternated directly, while the signal tie that sustains the
    # orbit is asserted every period.
    root = (spec.gap_target + 1.0) ** (1.0 / n)
    initial = np.array([[1.0, root], [1.0, root]])
    history = CostHistory(2, window=2)
    counts = np.array([n // 2, n - n // 2], dtype=float)
    interval_records = []
    for t in range(1, horizon + 1):
        signal = _windowed_envelope(history, 2, initial)
        if not np.allclose(signal[0], signal[1], rtol=0.0, atol=1e-12):
            raise AssertionError(
                f"interval arm lost its tie at t={t}: {signal!r}")
        costs = np.array([fn(c) for c in counts])
        social = social_cost_abstract(counts, [fn, fn], n)
        history.record_period(costs)
        interval_records.append(
            AbstractRecord(t, counts.copy(), costs, social, signal))
        counts = counts[::-1].copy()

    scalar_costs = np.array([r.social_cost for r in scalar_records])
    interval_costs = np.array([r.social_cost for r in interval_records])
    # Rescale by the agent count before subtracting: the per-capita costs
    # are ratios of exactly representable numerators, so the integer-scaled
    # difference avoids a rounding step and lands on the closed-form value.
    gap = float((n * scalar_costs[-1] - n * interval_costs[-1]) / n)
    lower = spec.gap_target - n * (root - 1.0)
    return FlappingReport(scalar_records, interval_records,
                          scalar_costs, interval_costs, gap, lower)


# ---------------------------------------------------------------------------
# Convergence check: two lockstep arms per trajectory, identical draws,
# different initial signals; the envelope recursion is non-expanding and
# the coupled distance should collapse.

@dataclass(frozen=True)
class ConvergenceReport:
    distance_series: np.ndarray
    ks_statistic: float
    ks_pvalue: float
    sample_a: np.ndarray
    sample_b: np.ndarray


def convergence_demo_config(
        agent_count: int = 20,
        action_count: int = 2) -> tuple[AbstractConfig,
                                        tuple[np.ndarray, np.ndarray]]:
    """Low-Lipschitz scenario for the convergence check.

    Per-action cost ``count/agent_count`` plus a small per-action offset;
    two deterministic-type groups (endpoint readers) under a two-atom
    renewal. The paired initial signals sit strictly inside the
    attainable cost range so realized extremes can overwrite them.
    """
    offsets = [0.05 * m for m in range(action_count)]
    costs = [linear_cost_fn(agent_count, offset=off) for off in offsets]
    renewal = finite_support([
        (PopulationProfile((0.8, 0.2)), 0.5),
        (PopulationProfile((0.2, 0.8)), 0.5),
    ])
    init_a = np.array([[0.30 + off, 0.60 + off] for off in offsets])
    init_b = np.array([[0.45 + off, 0.50 + off] for off in offsets])
    config = AbstractConfig(
        agent_count=agent_count,
        action_count=action_count,
        costs=costs,
        scheme=full_extreme_scheme(),
        renewal=renewal,
        initial_signal=init_a,
        seed=0,
        types=TypeSet((0.0, 1.0)),
    )
    return config, (init_a, init_b)


def convergence_check(config: AbstractConfig, trajectories: int,
                      horizon: int,
                      initial_signals: tuple[np.ndarray, np.ndarray],
                      seed: int) -> ConvergenceReport:
    """Drive paired trajectories from two initial signals with shared
    draws and measure how fast they forget where they started.

    Returns the L1 distance series of the first pair and the two-sample
    Kolmogorov-Smirnov statistic between the end-of-horizon first-action
    shares of the two arms across all pairs.
    """
    if config.scheme.kind != "full_extreme":
        raise ValidationError(
            "the convergence check drives the running-envelope scheme")
    if config.renewal.kind != "finite_support":
        raise ValidationError(
            "the convergence check needs a finite-support renewal")
    if trajectories < 1 or horizon < 1:
        raise ValidationError("trajectories and horizon must be >= 1")

    init_a = np.asarray(initial_signals[0], dtype=float)
    init_b = np.asarray(initial_signals[1], dtype=float)
    m = config.action_count
    n_types = len(config.types)
    omegas = np.array(config.types.omegas)
    atom_weights = np.array([p.weights for p, _ in config.renewal.atoms])
    atom_probs = np.cumsum([d for _, d in config.renewal.atoms])

    k = trajectories
    lo = {"a": np.tile(init_a[:, 0], (k, 1)), "b": np.tile(init_b[:, 0],
                                                           (k, 1))}
    hi = {"a": np.tile(init_a[:, 1], (k, 1)), "b": np.tile(init_b[:, 1],
                                                           (k, 1))}
    counts = {"a": np.zeros((k, m)), "b": np.zeros((k, m))}

    def pair_distance() -> float:
        return float(np.abs(lo["a"][0] - lo["b"][0]).sum()
                     + np.abs(hi["a"][0] - hi["b"][0]).sum())

    rng = derived_rng(seed, "convergence")
    distances = [pair_distance()]
    rows = np.arange(k)
    for _ in range(horizon):
        atom_idx = np.searchsorted(atom_probs, rng.random(k), side="right")
        atom_idx = np.minimum(atom_idx, len(atom_probs) - 1)
        shares = atom_weights[atom_idx]            # (k, n_types)
        tie_u = rng.random((k, n_types))
        for arm in ("a", "b"):
            new_counts = np.zeros((k, m))
            for j in range(n_types):
                w = omegas[j] * lo[arm] + (1.0 - omegas[j]) * hi[arm]
                wmin = w.min(axis=1, keepdims=True)
                mask = w == wmin
                n_ties = mask.sum(axis=1)
                pick = np.minimum((tie_u[:, j] * n_ties).astype(int),
                                  n_ties - 1)
                choice = (np.cumsum(mask, axis=1)
                          > pick[:, None]).argmax(axis=1)
                new_counts[rows, choice] += (shares[:, j]
                                             * config.agent_count)
            costs = np.column_stack(
                [config.costs[a](new_counts[:, a]) for a in range(m)])
            lo[arm] = np.minimum(lo[arm], costs)
            hi[arm] = np.maximum(hi[arm], costs)
            counts[arm] = new_counts
        distances.append(pair_distance())

    sample_a = counts["a"][:, 0] / config.agent_count
    sample_b = counts["b"][:, 0] / config.agent_count
    ks = ks_2samp(sample_a, sample_b)
    return ConvergenceReport(np.array(distances), float(ks.statistic),
                             float(ks.pvalue), sample_a, sample_b)
