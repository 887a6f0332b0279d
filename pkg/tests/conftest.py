"""Shared fixtures and independent oracles used across the suite."""

from __future__ import annotations

import itertools
import math

import pytest

from exoplan.config import EngineConfig
from exoplan.engine import Engine


def brute_force_edit_distance(target: list[str], hypothesis: list[str]) -> int:
    """Minimum edit cost by exhaustive enumeration of monotone alignments.

    Every subset of target positions matched (in order) against a same-size
    subset of hypothesis positions is a candidate alignment; unmatched target
    words are deletions, unmatched hypothesis words insertions, and matched
    unequal pairs substitutions.
    """
    n, m = len(target), len(hypothesis)
    best = n + m
    for k in range(min(n, m) + 1):
        for ti in itertools.combinations(range(n), k):
            for hj in itertools.combinations(range(m), k):
                subs = sum(1 for a, b in zip(ti, hj) if target[a] != hypothesis[b])
                cost = subs + (n - k) + (m - k)
                if cost < best:
                    best = cost
    return best


def series_sum_oracle(a0: float, a: list[float], b: list[float], angle: float) -> float:
    """Plain-Python term-by-term Fourier summation (no numpy)."""
    total = a0
    for k in range(1, len(a) + 1):
        total += a[k - 1] * math.cos(k * angle) + b[k - 1] * math.sin(k * angle)
    return total


def sit_stand_oracle(profile, joint: str, t: float) -> float:
    """Re-derive the sit/stand transform with the plain summation oracle."""
    from exoplan.gait import Direction

    s = min(max(t, 0.0), profile.duration)
    if profile.direction is Direction.STAND_TO_SIT:
        s = profile.duration - s
    tau = (s / profile.duration) * profile.t_star[joint]
    series = profile.series[joint]
    value = series_sum_oracle(series.a0, list(series.a), list(series.b), profile.omega_s * tau)
    return profile.peak[joint] - value


@pytest.fixture
def default_engine() -> Engine:
    return Engine(EngineConfig())


@pytest.fixture
def standing_engine() -> Engine:
    cfg = EngineConfig()
    cfg.initial_state = "standing"
    return Engine(cfg)
