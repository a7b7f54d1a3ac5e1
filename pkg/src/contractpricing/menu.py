"""Quality-price menu construction for a fixed user type profile.

Given per-type budgets P_i, a cost C and a profit target B, each type is
assigned the quality that maximizes its net saving
``f_i(s) = P_i(s) - C(s) - B(s)`` over the feasible set ``{f_i >= 0}``,
and the price tag ``p_i = C(s_i) + B(s_i)``.  Under the regularity
conditions checked by :func:`~contractpricing.functions.check_menu_regularity`
the resulting menu satisfies the individual-rationality and
incentive-compatibility constraints by construction; the solver still
certifies every menu through the independent verifier before returning it.

All searches use plain bisection: only continuity and monotonicity of
the derivative are guaranteed, and robustness beats speed at these
problem sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BracketError,
    CertificationError,
    DegenerateTypesError,
    NoInteriorMaximizerError,
    RegularityError,
    ScenarioError,
    UnboundedFeasibleSetError,
)
from .functions import ScalarFunction, check_menu_regularity
from .verify import verify_menu

#: relative bracket width at which the maximizer bisection stops
MAXIMIZER_TOL = 1e-9

#: relative bracket width at which the feasible-boundary bisection stops
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class MenuScenario:
    """Inputs of the menu construction.

    ``budgets`` are ordered by type (lowest first) and must satisfy the
    single crossing condition for consecutive pairs; ``s_probe_max`` and
    ``grid_n`` control the regularity scan, ``s_search_max`` caps all
    bracketing searches.
    """

    budgets: tuple[ScalarFunction, ...]
    cost: ScalarFunction
    profit: ScalarFunction
    s_search_max: float = 1e6
    s_probe_max: float = 100.0
    grid_n: int = 512

    def __post_init__(self):
        object.__setattr__(self, "budgets", tuple(self.budgets))

    @property
    def n_types(self) -> int:
        return len(self.budgets)

    def validate(self) -> None:
        if self.n_types < 1:
            raise ScenarioError("at least one budget function is required")
        if self.s_search_max <= 0:
            raise ScenarioError("s_search_max must be positive")
        if not 0 < self.s_probe_max <= self.s_search_max:
            raise ScenarioError("s_probe_max must lie in (0, s_search_max]")
        if self.grid_n < 16:
            raise ScenarioError("grid_n must be at least 16")

    def net(self, i: int, s):
        """Net saving f_i(s) = P_i(s) - C(s) - B(s) for 1-based type i."""
        return (np.asarray(self.budgets[i - 1].value(s))
                - np.asarray(self.cost.value(s))
                - np.asarray(self.profit.value(s)))

    def net_derivative(self, i: int, s):
        return (np.asarray(self.budgets[i - 1].derivative(s))
                - np.asarray(self.cost.derivative(s))
                - np.asarray(self.profit.derivative(s)))

    def check_regularity(self):
        return check_menu_regularity(self.budgets, self.cost, self.profit,
                                     (0.0, self.s_probe_max), self.grid_n,
                                     s_cap=self.s_search_max)


@dataclass(frozen=True)
class QualityPriceMenu:
    """Solved menu: one (quality, price) entry per type, lowest first."""

    qualities: tuple[float, ...]
    prices: tuple[float, ...]
    net_values: tuple[float, ...]

    @property
    def entries(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.qualities, self.prices))

    def to_dict(self) -> dict:
        return {
            "entries": [
                {"type": k + 1, "s": s, "p": p, "net": net}
                for k, (s, p, net) in enumerate(
                    zip(self.qualities, self.prices, self.net_values))
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QualityPriceMenu":
        entries = data["entries"]
        return cls(
            qualities=tuple(float(e["s"]) for e in entries),
            prices=tuple(float(e["p"]) for e in entries),
            net_values=tuple(float(e["net"]) for e in entries),
        )


def _check_type_index(i: int, scenario: MenuScenario) -> None:
    if not 1 <= i <= scenario.n_types:
        raise ScenarioError(f"type index {i} outside 1..{scenario.n_types}")


def feasible_interval(i: int, scenario: MenuScenario) -> tuple[float, float]:
    """Feasible quality interval [0, a_i] of type ``i`` (1-based).

    ``a_i`` is the positive boundary of ``{f_i >= 0}``, located by a
    geometric scan for a sign bracket followed by bisection.  Returns the
    degenerate interval (0, 0) when the net saving is negative everywhere
    on (0, s_search_max].
    """
    _check_type_index(i, scenario)
    cap = scenario.s_search_max
    candidates = np.geomspace(cap * 1e-15, cap, 256)
    vals = scenario.net(i, candidates)

    pos = np.flatnonzero(vals > 0.0)
    if pos.size == 0:
        return (0.0, 0.0)
    first_pos = int(pos[0])

    neg = np.flatnonzero(vals[first_pos:] < 0.0)
    if neg.size == 0:
        raise UnboundedFeasibleSetError(
            f"net saving of type {i} stays nonnegative up to s_search_max="
            f"{cap:g}; enlarge the search bracket")
    hi_idx = first_pos + int(neg[0])
    lo = float(candidates[hi_idx - 1])
    hi = float(candidates[hi_idx])

    while hi - lo > ROOT_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if float(scenario.net(i, mid)) >= 0.0:
            lo = mid
        else:
            hi = mid
    return (0.0, 0.5 * (lo + hi))


def maximize_net(i: int, scenario: MenuScenario) -> float:
    """Quality s_i maximizing the net saving of type ``i`` (1-based).

    The stationary point is the unique zero of the strictly decreasing
    derivative f'_i on the feasible interval, found by bisection down to
    a bracket width of ``MAXIMIZER_TOL * max(1, a_i)``.
    """
    _check_type_index(i, scenario)
    _, a_i = feasible_interval(i, scenario)
    if a_i <= 0.0:
        raise NoInteriorMaximizerError(
            f"type {i} has a degenerate feasible interval; no quality earns "
            "a nonnegative net saving")

    lo = min(1e-9, 1e-9 * a_i)
    if float(scenario.net_derivative(i, lo)) <= 0.0:
        raise NoInteriorMaximizerError(
            f"net saving of type {i} is nonincreasing at 0+; the maximum "
            "sits at zero quality")
    if float(scenario.net_derivative(i, a_i)) >= 0.0:
        raise BracketError(
            f"net-saving derivative of type {i} does not change sign on "
            f"(0, {a_i:g}]")

    hi = a_i
    tol = MAXIMIZER_TOL * max(1.0, a_i)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if float(scenario.net_derivative(i, mid)) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_menu(scenario: MenuScenario, *, check_regularity: bool = True) -> QualityPriceMenu:
    """Construct and certify the full quality-price menu.

    Runs the regularity checks (unless ``check_regularity=False``, for
    callers that already validated the scenario), maximizes each type's
    net saving, prices every quality at cost plus target profit, and
    certifies the result through the independent verifier before
    returning it.
    """
    scenario.validate()
    if check_regularity:
        report = scenario.check_regularity()
        if not report.passed:
            failed = ", ".join(c.cid for c in report.failures)
            raise RegularityError(
                f"regularity conditions failed: {failed}", report=report)

    qualities: list[float] = []
    prices: list[float] = []
    nets: list[float] = []
    for i in range(1, scenario.n_types + 1):
        s_i = maximize_net(i, scenario)
        p_i = float(scenario.cost.value(s_i)) + float(scenario.profit.value(s_i))
        qualities.append(s_i)
        prices.append(p_i)
        nets.append(float(scenario.net(i, s_i)))

    for k in range(1, scenario.n_types):
        if not (qualities[k] > qualities[k - 1] and prices[k] > prices[k - 1]):
            raise DegenerateTypesError(
                f"types {k} and {k + 1} produced non-increasing entries "
                f"(s: {qualities[k - 1]:g} -> {qualities[k]:g}, "
                f"p: {prices[k - 1]:g} -> {prices[k]:g}); budgets are too close")

    menu = QualityPriceMenu(tuple(qualities), tuple(prices), tuple(nets))
    report = verify_menu(menu, scenario)
    if not report.passed:
        raise CertificationError(
            "constructed menu failed verification", report=report)
    return menu
