"""Achievable profit-satisfaction regions and tradeoff curves.

For the homogeneous bilinear family (qualities on a uniform ladder,
margins proportional to quality, tariff d_p * theta * s) the achievable
(b, m) region has a linear boundary

    m * (4 * quality_range * L^2) + b * (L / d_p) = demand_range

whose extremes are the zero-profit satisfaction cap ``m0`` and the
zero-satisfaction profit cap ``b0``.  For arbitrary scenarios the region
is estimated empirically by sweeping a (b, m) grid through the exact
solver-side achievability predicate.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ScenarioError
from .profile import (
    MarginSpec,
    ProfileScenario,
    check_achievability,
    sensitivity_bounds,
    step_size,
)
from .functions import check_marginal_budget


@dataclass(frozen=True)
class TradeoffCurve:
    """Boundary of the achievable (m, b) region, homogeneous bilinear case."""

    quality_range: float
    demand_range: float
    n_types: int
    d_p: float
    points: tuple[tuple[float, float], ...]
    m0: float
    b0: float

    def normalized_m(self, m: float) -> float:
        """Satisfaction margin rescaled by 4 * quality_range * L^2."""
        return 4.0 * self.quality_range * self.n_types ** 2 * m

    def to_dict(self) -> dict:
        return {
            "quality_range": self.quality_range,
            "demand_range": self.demand_range,
            "n_types": self.n_types,
            "d_p": self.d_p,
            "m0": self.m0,
            "b0": self.b0,
            "points": [{"m": m, "b": b, "normalized_m": self.normalized_m(m)}
                       for m, b in self.points],
        }

    def csv_rows(self) -> list[tuple]:
        return [(m, b, self.normalized_m(m), True) for m, b in self.points]


def homogeneous_region(quality_range: float, demand_range: float,
                       n_types: int, d_p: float,
                       n_points: int = 50) -> TradeoffCurve:
    """Boundary points of the achievable region, from (m0, .) to (0, b0).

    ``n_points`` satisfaction margins are spaced uniformly between the
    zero-profit cap ``m0 = min(1, demand_range / (4 * quality_range * L^2))``
    and zero; each carries the boundary profit
    ``b = (demand_range - 4 * quality_range * L^2 * m) * d_p / L``.
    """
    if min(quality_range, demand_range, d_p) <= 0 or n_types < 1:
        raise ScenarioError("tradeoff parameters must be positive")
    if n_points < 2:
        raise ScenarioError("n_points must be at least 2")

    coef_m = 4.0 * quality_range * n_types ** 2
    m0 = min(1.0, demand_range / coef_m)
    b0 = demand_range * d_p / n_types
    ms = np.linspace(m0, 0.0, n_points)
    bs = (demand_range - coef_m * ms) * d_p / n_types
    points = tuple((float(m), float(b)) for m, b in zip(ms, bs))
    return TradeoffCurve(quality_range, demand_range, n_types, d_p,
                         points, float(m0), float(b0))


def empirical_region(scenario_template: ProfileScenario,
                     b_grid: Sequence[float],
                     m_grid: Sequence[float]) -> np.ndarray:
    """Achievability matrix over a (b, m) grid for an arbitrary scenario.

    Cell (i, j) reports whether the margins ``b_k = b_grid[i] * s_k``,
    ``m_k = m_grid[j] * s_k`` pass the full achievability check of the
    profile solver.  The margin-independent pieces (marginal-budget scan,
    sensitivity bounds) are computed once; the per-cell conditions reuse
    the solver's own predicate, so the matrix is exactly the set of
    scenarios :func:`~contractpricing.profile.build_profile` accepts.
    """
    b_grid = np.asarray(b_grid, dtype=float)
    m_grid = np.asarray(m_grid, dtype=float)
    for name, grid in (("b_grid", b_grid), ("m_grid", m_grid)):
        if grid.ndim != 1 or grid.size == 0:
            raise ScenarioError(f"{name} must be a nonempty 1-D grid")
        if grid[0] <= 0 or np.any(np.diff(grid) <= 0):
            raise ScenarioError(f"{name} must be positive and increasing")

    qualities = np.asarray(scenario_template.qualities, dtype=float)
    n = qualities.size
    # margin-independent pieces, computed once for the whole sweep
    marginal = check_marginal_budget(scenario_template.tariff,
                                     scenario_template.cost,
                                     scenario_template.box,
                                     scenario_template.grid_n)
    sens = [sensitivity_bounds(scenario_template, j) for j in range(2, n + 1)]

    result = np.zeros((b_grid.size, m_grid.size), dtype=bool)
    for i, b in enumerate(b_grid):
        b_vec = b * qualities
        gaps = np.diff(b_vec)
        for j, m in enumerate(m_grid):
            m_vec = m * qualities
            margins = MarginSpec(b=tuple(b_vec), m=tuple(m_vec))
            scenario = dataclasses.replace(scenario_template, margins=margins)
            deltas = [float(m_vec[0])]
            deltas += [step_size(m_vec[k + 1], m_vec[k], eps, dlt, gaps[k])
                       for k, (eps, dlt) in enumerate(sens)]
            report = check_achievability(scenario, _marginal=marginal,
                                         _deltas=tuple(deltas))
            result[i, j] = report.passed
    return result
