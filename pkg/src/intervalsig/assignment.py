"""Turn a published interval signal into edge flows.

Each traveller type reads the signal through a weight ``omega``: the
route weight of an edge is ``omega * lower + (1 - omega) * upper``.
Every agent of a type takes a weight-shortest route, splitting equally
across all tied routes, and the per-type loads add up to the edge flows
for the period.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .network import (
    DemandTable,
    Network,
    NoPathError,
    TIE_TOL,
    TIE_TOL_ABS,
    ValidationError,
    _tight_split,
    dijkstra,
)
from .population import PopulationProfile, TypeSet

__all__ = [
    "FlowState",
    "PathLoad",
    "ValidationError",
    "assign",
    "choose_action_abstract",
    "edge_weight",
]


def edge_weight(signal: np.ndarray, omega: float) -> np.ndarray:
    """Collapse an ``(n, 2)`` interval signal to scalar weights.

    ``omega = 1`` trusts the lower endpoints, ``omega = 0`` the upper
    ones, and values in between interpolate linearly.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 2 or signal.shape[1] != 2:
        raise ValidationError(
            f"signal must have shape (n, 2), got {signal.shape}")
    return omega * signal[:, 0] + (1.0 - omega) * signal[:, 1]


class PathLoad(NamedTuple):
    """Agents of one type on one origin-destination pair."""

    origin: int
    dest: int
    omega: float
    cost: float      # weight-shortest distance as this type perceives it
    agents: float


@dataclass
class FlowState:
    """Result of loading one period's demand onto the network.

    ``group_shares[g]`` holds the per-edge share vector of group ``g``
    (one group per type and origin-destination pair, in ``path_loads``
    order), so ``agents @ group_shares`` reproduces ``edge_flows`` and
    ``group_shares @ realized_edge_costs`` yields each group's realized
    route cost.
    """

    edge_flows: np.ndarray
    path_loads: list[PathLoad]
    group_shares: np.ndarray


def assign(
    net: Network,
    demand: DemandTable,
    signal: np.ndarray,
    profile: PopulationProfile,
    types: TypeSet,
    demand_scale: float = 1.0,
) -> FlowState:
    """Route every agent along its weight-shortest paths.

    The signal must cover every edge (shape ``(edge_count, 2)``) with
    non-negative endpoints.  ``demand_scale`` multiplies all demands.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.shape != (net.edge_count, 2):
        raise ValidationError(
            f"signal shape {signal.shape} does not match "
            f"({net.edge_count}, 2)")
    if len(profile.weights) != len(types):
        raise ValidationError(
            f"profile has {len(profile.weights)} weights for "
            f"{len(types)} types")

    pairs = sorted(demand.entries)
    origins = sorted({o for o, _ in pairs})
    dests = sorted({d for _, d in pairs})

    edge_flows = np.zeros(net.edge_count)
    path_loads: list[PathLoad] = []
    share_rows: list[np.ndarray] = []

    for omega, weight_share in zip(types.omegas, profile.weights):
        weights = edge_weight(signal, omega)
        forward = {o: dijkstra(net, weights, o) for o in origins}
        backward = {d: dijkstra(net, weights, d, reverse=True)[0]
                    for d in dests}
        for origin, dest in pairs:
            agents = weight_share * demand.entries[(origin, dest)] \
                * demand_scale
            dist_f, order_f = forward[origin]
            _, shares, _, _, _ = _tight_split(
                net, weights, dist_f, order_f, backward[dest],
                origin, dest, TIE_TOL, TIE_TOL_ABS)
            edge_flows += agents * shares
            path_loads.append(
                PathLoad(origin, dest, omega, float(dist_f[dest]), agents))
            share_rows.append(shares)

    group_shares = (np.array(share_rows) if share_rows
                    else np.empty((0, net.edge_count)))
    return FlowState(edge_flows, path_loads, group_shares)


def choose_action_abstract(
    signal: np.ndarray, omega: float, rng: np.random.Generator
) -> int:
    """Pick a weight-minimal action, uniformly at random among ties.

    A unique minimizer is returned without consulting ``rng``.
    """
    weights = edge_weight(signal, omega)
    ties = np.flatnonzero(weights == weights.min())
    if len(ties) == 1:
        return int(ties[0])
    return int(ties[rng.integers(len(ties))])
