"""Power-constrained age minimization.

With the power budget binding, the step-2 rate is pinned at
``mu2*(rho) = (P / (E[C]^alpha * Nbar(rho)))^(1/alpha)`` and the problem
reduces to a one-dimensional search over the rate ratio rho.  Every
shipped policy's age is strictly decreasing in mu2 at fixed rho, so
optimizing on the constraint boundary loses nothing.

The search runs a coarse log-spaced grid scan to bracket the minimum
(the objective diverges as rho -> 0 and rho -> infinity, so the minimizer
is interior), then golden-section refinement inside the bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .policies import Policy, RatePair, age_factor, closed_form_age, pwpa_total

__all__ = [
    "PowerModel",
    "OptResult",
    "SearchSettings",
    "RhoSweepPoint",
    "PowerSweepRow",
    "mu2_star",
    "objective",
    "optimize",
    "sweep_rho",
    "sweep_power",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class PowerModel:
    """Total power budget, per-step CPU workload, and frequency exponent.

    The power drawn by a processor serving step i at rate mu_i is
    ``(mean_cycles * mu_i)**alpha`` (idle processors draw nothing);
    the budget caps the expected total over both servers.
    """

    budget: float = 8.0
    mean_cycles: float = 1.0
    alpha: float = 5.0

    def __post_init__(self) -> None:
        if self.budget <= 0 or self.mean_cycles <= 0:
            raise ValueError(f"budget and mean_cycles must be positive, got {self}")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")


@dataclass(frozen=True)
class SearchSettings:
    rho_min: float = 1e-3
    rho_max: float = 1e3
    tol: float = 1e-8
    grid_points: int = 200

    def __post_init__(self) -> None:
        if not 0 < self.rho_min < self.rho_max:
            raise ValueError("need 0 < rho_min < rho_max")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")


@dataclass(frozen=True)
class OptResult:
    policy: Policy
    rho_star: float
    mu2_star: float
    mu1_star: float
    delta_star: float
    achieved_power: float
    iterations: int


@dataclass(frozen=True)
class RhoSweepPoint:
    rho: float
    mu2_star: float
    delta_star: float


@dataclass(frozen=True)
class PowerSweepRow:
    policy: Policy
    budget: float
    rho_star: float
    mu2_star: float
    delta_star: float


def mu2_star(policy: Policy, rho, power: PowerModel):
    """Largest step-2 rate the budget allows at the given ratio.

    Accepts a scalar or an array of rho values.
    """
    nbar = pwpa_total(policy, rho, power.alpha)
    return (power.budget / (power.mean_cycles**power.alpha * nbar)) ** (
        1.0 / power.alpha
    )


def objective(policy: Policy, rho, power: PowerModel):
    """Optimal age at a fixed ratio: the closed-form age at mu2*(rho)."""
    return age_factor(policy, rho) / mu2_star(policy, rho, power)


def _achieved_power(policy: Policy, rho: float, mu2: float, power: PowerModel) -> float:
    nbar = float(pwpa_total(policy, rho, power.alpha))
    return power.mean_cycles**power.alpha * mu2**power.alpha * nbar


def optimize(
    policy: Policy,
    power: PowerModel,
    search: SearchSettings | None = None,
) -> OptResult:
    """Minimize the power-constrained age over the rate ratio.

    Grid scan brackets the best point, golden-section refines the bracket
    to width ``search.tol``.  Raises ``ArithmeticError`` if the objective
    is non-finite anywhere on the grid.
    """
    search = search if search is not None else SearchSettings()
    grid = np.geomspace(search.rho_min, search.rho_max, search.grid_points)
    vals = objective(policy, grid, power)
    if not np.all(np.isfinite(vals)):
        bad = grid[~np.isfinite(np.asarray(vals))][0]
        raise ArithmeticError(
            f"objective for {policy.value} is non-finite at rho={bad:g}"
        )
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]

    # golden-section refinement
    h = b - a
    iterations = 0
    if h > search.tol:
        n = int(math.ceil(math.log(search.tol / h) / math.log(_INV_PHI)))
        c = a + _INV_PHI_SQ * h
        d = a + _INV_PHI * h
        yc = float(objective(policy, c, power))
        yd = float(objective(policy, d, power))
        for _ in range(n):
            iterations += 1
            if yc < yd:
                b, d, yd = d, c, yc
                h *= _INV_PHI
                c = a + _INV_PHI_SQ * h
                yc = float(objective(policy, c, power))
            else:
                a, c, yc = c, d, yd
                h *= _INV_PHI
                d = a + _INV_PHI * h
                yd = float(objective(policy, d, power))
    rho_star = (a + b) / 2.0
    m2 = float(mu2_star(policy, rho_star, power))
    return OptResult(
        policy=policy,
        rho_star=float(rho_star),
        mu2_star=m2,
        mu1_star=float(rho_star * m2),
        delta_star=closed_form_age(policy, RatePair(mu2=m2, rho=float(rho_star))),
        achieved_power=_achieved_power(policy, float(rho_star), m2, power),
        iterations=iterations + len(grid),
    )


def sweep_rho(
    policy: Policy, power: PowerModel, grid
) -> tuple[list[RhoSweepPoint], int]:
    """Evaluate the unconstrained objective pointwise over a rho grid.

    Returns the curve and the index of its smallest point.
    """
    rhos = np.asarray(grid, dtype=float)
    if rhos.size == 0:
        raise ValueError("rho grid must be nonempty")
    if np.any(rhos <= 0):
        raise ValueError("rho grid values must be positive")
    m2 = mu2_star(policy, rhos, power)
    deltas = age_factor(policy, rhos) / m2
    points = [
        RhoSweepPoint(float(r), float(m), float(d))
        for r, m, d in zip(rhos, np.atleast_1d(m2), np.atleast_1d(deltas))
    ]
    return points, int(np.argmin(deltas))


def sweep_power(
    policies: list[Policy],
    power_grid,
    base: PowerModel | None = None,
    search: SearchSettings | None = None,
) -> list[PowerSweepRow]:
    """Optimal age per policy as a function of the power budget."""
    base = base if base is not None else PowerModel()
    budgets = [float(p) for p in power_grid]
    if not budgets or any(p <= 0 for p in budgets):
        raise ValueError("power grid must be nonempty and positive")
    if sorted(budgets) != budgets:
        raise ValueError("power grid must be ascending")
    rows = []
    for policy in policies:
        for budget in budgets:
            pm = PowerModel(budget=budget, mean_cycles=base.mean_cycles, alpha=base.alpha)
            res = optimize(policy, pm, search)
            rows.append(
                PowerSweepRow(
                    policy=policy,
                    budget=budget,
                    rho_star=res.rho_star,
                    mu2_star=res.mu2_star,
                    delta_star=res.delta_star,
                )
            )
    return rows
