"""Discrete-time simulation loop.

Each period: draw a fresh population mix, publish a per-edge signal
computed from the cost history, route every agent by its signal-weighted
shortest paths, realize congestion costs, record them into the history,
and log flows, costs, social cost, and capacity excess.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .costs import (
    edge_costs,
    minimize_scalar_on_interval,
    social_cost_network,
    total_excess,
)
from .instances import load_instance
from .network import DemandTable, Network, ValidationError, parse_network, \
    parse_trips
from .population import (
    derived_rng,
    sample_profile,
    uniform_perturbation,
    uniform_type_set,
)
from .signaling import CostHistory, Scheme, emit_signal
from .assignment import assign

__all__ = [
    "PeriodRecord",
    "ReferenceCosts",
    "RunConfig",
    "Summary",
    "ValidationError",
    "diamond_sue_oracle",
    "records_to_csv",
    "run",
    "summarize",
    "write_csv",
]


@dataclass(frozen=True)
class ReferenceCosts:
    """Externally supplied benchmark values a run is compared against."""

    capped_cost: float | None = None
    uncapped_cost: float | None = None
    excess: float | None = None


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one simulation run.

    The problem instance comes from exactly one source: a built-in
    ``instance`` name, a pair of TNTP file paths, or a pair of TNTP
    strings.
    """

    scheme: Scheme
    horizon: int
    seed: int
    capped: bool = True
    instance: str | None = None
    net_path: str | Path | None = None
    trips_path: str | Path | None = None
    net_text: str | None = None
    trips_text: str | None = None
    type_count: int = 5
    epsilon: float = 0.15
    reference: ReferenceCosts | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValidationError("horizon must be >= 1")
        if self.epsilon < 0:
            raise ValidationError("epsilon must be >= 0")
        sources = [self.instance is not None,
                   self.net_path is not None or self.trips_path is not None,
                   self.net_text is not None or self.trips_text is not None]
        if sum(sources) != 1:
            raise ValidationError(
                "specify exactly one instance source: a built-in name, "
                "a pair of file paths, or a pair of TNTP strings")
        if sources[1] and (self.net_path is None or self.trips_path is None):
            raise ValidationError("both net_path and trips_path are needed")
        if sources[2] and (self.net_text is None or self.trips_text is None):
            raise ValidationError("both net_text and trips_text are needed")

    def load(self) -> tuple[Network, DemandTable]:
        if self.instance is not None:
            return load_instance(self.instance)
        if self.net_path is not None:
            return (parse_network(Path(self.net_path).read_text()),
                    parse_trips(Path(self.trips_path).read_text()))
        return parse_network(self.net_text), parse_trips(self.trips_text)


@dataclass
class PeriodRecord:
    """Everything observed in one period."""

    t: int
    flows: np.ndarray
    costs: np.ndarray
    social_cost: float
    total_excess: float
    weights: np.ndarray
    signal: np.ndarray = field(repr=False)


def run(config: RunConfig) -> list[PeriodRecord]:
    """Simulate ``config.horizon`` periods; deterministic given the seed."""
    net, demand = config.load()
    types = uniform_type_set(config.type_count)
    renewal = uniform_perturbation(config.type_count, config.epsilon)
    history = CostHistory(net.edge_count,
                          window=config.scheme.history_window())
    pop_rng = derived_rng(config.seed, "population")

    records: list[PeriodRecord] = []
    for t in range(1, config.horizon + 1):
        profile = sample_profile(renewal, pop_rng)
        signal = emit_signal(history, config.scheme, net.edge_count)
        state = assign(net, demand, signal, profile, types)
        costs = edge_costs(net, state.edge_flows, capped=config.capped)
        history.record_period(costs)
        realized = state.group_shares @ costs
        agents = [load.agents for load in state.path_loads]
        social = social_cost_network(state.edge_flows,
                                     list(zip(realized, agents)))
        records.append(PeriodRecord(
            t=t,
            flows=state.edge_flows,
            costs=costs,
            social_cost=social,
            total_excess=total_excess(net, state.edge_flows),
            weights=np.array(profile.weights),
            signal=signal,
        ))
    return records


@dataclass(frozen=True)
class Summary:
    """Tail-window averages of a run."""

    window: int
    mean_cost: float
    mean_excess: float
    regret: float | None


def summarize(records: list[PeriodRecord],
              reference_cost: float | None = None,
              window: int | None = None) -> Summary:
    """Average social cost and excess over the last ``window`` periods.

    The default window is the last 50 periods (or the whole run when
    shorter).  Regret is the mean cost minus ``reference_cost`` and is
    omitted when no reference is given.
    """
    if not records:
        raise ValidationError("cannot summarize an empty run")
    if window is None:
        window = min(50, len(records))
    if not 1 <= window <= len(records):
        raise ValidationError(
            f"window {window} must be in [1, {len(records)}]")
    tail = records[-window:]
    mean_cost = float(np.mean([r.social_cost for r in tail]))
    mean_excess = float(np.mean([r.total_excess for r in tail]))
    regret = None if reference_cost is None else mean_cost - reference_cost
    return Summary(window, mean_cost, mean_excess, regret)


_FLOAT_FMT = "%.17g"


def records_to_csv(records: list[PeriodRecord]) -> str:
    """Render one row per period; floats carry 17 significant digits so
    parsing the file back reproduces them exactly."""
    if not records:
        raise ValidationError("cannot serialize an empty run")
    k = len(records[0].weights)
    e = len(records[0].flows)
    header = (["t", "social_cost", "total_excess"]
              + [f"w_omega_{i}" for i in range(1, k + 1)]
              + [f"flow_e{i}" for i in range(1, e + 1)]
              + [f"cost_e{i}" for i in range(1, e + 1)]
              + [f"ulo_e{i}" for i in range(1, e + 1)]
              + [f"uhi_e{i}" for i in range(1, e + 1)])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        row = [str(rec.t)]
        row.extend(_FLOAT_FMT % v for v in (rec.social_cost,
                                            rec.total_excess))
        for block in (rec.weights, rec.flows, rec.costs,
                      rec.signal[:, 0], rec.signal[:, 1]):
            row.extend(_FLOAT_FMT % v for v in block)
        writer.writerow(row)
    return buf.getvalue()


def write_csv(records: list[PeriodRecord], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records))


def diamond_sue_oracle() -> dict[str, float]:
    """Closed-form reference point for the diamond instance.

    Minimizes ``(2-x)(1+(2-x)^2) + x(10+x^6)`` over ``x in [0, 2]`` and
    evaluates the diamond network at the split the minimizer implies
    (``15x`` agents on the lower middle link, ``15(2-x)`` on the upper).
    Returns the expression minimum as ``uncapped_cost`` together with the
    capped social cost and capacity excess of that split; the network's
    own uncapped social cost at the split is included as a diagnostic.
    """
    def expression(x: float) -> float:
        return (2 - x) * (1 + (2 - x) ** 2) + x * (10 + x ** 6)

    split, minimum = minimize_scalar_on_interval(expression, 0.0, 2.0)

    net, _ = load_instance("diamond")
    flows = np.zeros(net.edge_count)
    flows[0] = 30.0
    flows[1] = 15.0 * (2.0 - split)   # upper middle link 2-3
    flows[2] = 15.0 * split           # lower middle link 2-4
    flows[3] = flows[1]
    flows[4] = flows[2]
    capped = float(flows @ edge_costs(net, flows, capped=True))
    uncapped = float(flows @ edge_costs(net, flows, capped=False))
    return {
        "split": split,
        "uncapped_cost": minimum,
        "capped_cost": capped,
        "excess": total_excess(net, flows),
        "network_uncapped_cost": uncapped,
    }
