"""Per-resource cost histories and the signal each scheme emits from them.

A signal is an (M, 2) float array of per-resource (u_lo, u_hi) intervals;
scalar schemes emit degenerate intervals with u_lo = u_hi. Until enough
full periods are recorded, schemes emit the warm-up signal (0, 0): one
period suffices for scalar schemes, interval schemes need two.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .network import ValidationError

_KINDS = ("now", "mean", "extreme", "full_extreme", "subinterval")


@dataclass(frozen=True)
class Scheme:
    kind: str
    window: int | None = None
    shrink: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown scheme kind {self.kind!r}")
        if self.kind in ("extreme", "subinterval"):
            if self.window is None or self.window < 1:
                raise ValidationError(
                    f"{self.kind} needs a window of at least 1")
        if self.kind == "subinterval":
            if self.shrink is None or not 0.0 <= self.shrink <= 1.0:
                raise ValidationError("shrink factor must lie in [0, 1]")

    def history_window(self) -> int:
        """How many recent costs the history must retain for this scheme."""
        if self.kind in ("extreme", "subinterval"):
            return self.window
        return 1

    def label(self) -> str:
        name = self.kind.replace("_", "-")
        if self.kind in ("extreme", "subinterval"):
            name += f"-r{self.window}"
        if self.kind == "subinterval":
            name += f"-a{self.shrink:g}"
        return name


def now_scheme() -> Scheme:
    return Scheme("now")


def mean_scheme() -> Scheme:
    return Scheme("mean")


def extreme_scheme(window: int) -> Scheme:
    return Scheme("extreme", window=window)


def full_extreme_scheme() -> Scheme:
    return Scheme("full_extreme")


def subinterval_scheme(window: int, shrink: float) -> Scheme:
    return Scheme("subinterval", window=window, shrink=shrink)


def scheme_from_name(name: str, window: int | None = None,
                     shrink: float | None = None) -> Scheme:
    kind = name.replace("-", "_")
    if kind == "subinterval":
        return Scheme(kind, window=window,
                      shrink=1.0 if shrink is None else shrink)
    if kind == "extreme":
        return Scheme(kind, window=window)
    return Scheme(kind)


class CostHistory:
    """Bounded recent-cost deques plus running aggregates per resource."""

    def __init__(self, m_count: int, window: int | None = None):
        if m_count < 1:
            raise ValidationError("history needs at least one resource")
        self.m_count = m_count
        self.window = window
        self._recent = [deque(maxlen=window) for _ in range(m_count)]
        self._count = [0] * m_count
        self._sum = [0.0] * m_count
        self._min = [math.inf] * m_count
        self._max = [-math.inf] * m_count

    def record(self, m: int, cost: float) -> None:
        if not math.isfinite(cost) or cost < 0:
            raise ValidationError(f"cost must be finite and >= 0, got {cost}")
        self._recent[m].append(float(cost))
        self._count[m] += 1
        self._sum[m] += cost
        self._min[m] = min(self._min[m], cost)
        self._max[m] = max(self._max[m], cost)

    def record_period(self, costs) -> None:
        """Record one period's cost for every resource at once."""
        costs = list(costs)
        if len(costs) != self.m_count:
            raise ValidationError(
                f"expected {self.m_count} costs, got {len(costs)}")
        for m, cost in enumerate(costs):
            self.record(m, cost)

    def recent(self, m: int):
        return self._recent[m]

    def count(self, m: int) -> int:
        return self._count[m]

    def full_periods(self) -> int:
        """Periods for which every resource has a recorded cost."""
        return min(self._count)

    def running_min(self, m: int) -> float:
        return self._min[m]

    def running_max(self, m: int) -> float:
        return self._max[m]

    def running_mean(self, m: int) -> float:
        return self._sum[m] / self._count[m]

    def window_extremes(self, m: int, r: int) -> tuple[float, float]:
        """Min and max over the min(r, recorded) most recent costs of m."""
        recent = self._recent[m]
        take = min(r, len(recent))
        tail = list(recent)[len(recent) - take:]
        return min(tail), max(tail)


def emit_signal(history: CostHistory, scheme: Scheme,
                m_count: int) -> np.ndarray:
    """Signal for the coming period from what the history holds so far."""
    if m_count != history.m_count:
        raise ValidationError(
            f"history covers {history.m_count} resources, asked for {m_count}")
    signal = np.zeros((m_count, 2))
    if scheme.kind == "now":
        for m in range(m_count):
            if history.count(m) >= 1:
                signal[m] = history.recent(m)[-1]
        return signal
    if scheme.kind == "mean":
        for m in range(m_count):
            if history.count(m) >= 1:
                signal[m] = history.running_mean(m)
        return signal
    if history.full_periods() < 2:
        return signal
    if scheme.kind == "full_extreme":
        for m in range(m_count):
            signal[m] = (history.running_min(m), history.running_max(m))
        return signal
    for m in range(m_count):
        signal[m] = history.window_extremes(m, scheme.window)
    if scheme.kind == "subinterval" and scheme.shrink != 1.0:
        mid = signal.mean(axis=1)
        half = scheme.shrink * (signal[:, 1] - signal[:, 0]) / 2.0
        signal[:, 0] = mid - half
        signal[:, 1] = mid + half
    return signal


def validate_subinterval(signal: np.ndarray, history: CostHistory,
                         r: int) -> bool:
    """True iff every interval sits inside the r-window min/max envelope."""
    tol = 1e-12
    for m in range(history.m_count):
        lo, hi = history.window_extremes(m, r)
        slack = tol * max(1.0, abs(lo), abs(hi))
        if not (lo - slack <= signal[m, 0] <= signal[m, 1] <= hi + slack):
            return False
    return True
