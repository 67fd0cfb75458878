"""Catalog of the seven two-step update-processing policies.

Four series arrangements (server 1 runs step 1, server 2 runs step 2) and
three parallel arrangements (each server can run both steps).  Every policy
provides three things:

* an SHS model builder (``build_model``) giving the exact state, transition,
  reset, and activity structure,
* a closed-form average age ``closed_form_age(policy, rates)``,
* the power-weighted processor activity ``pwpa(policy, rho, alpha)`` with
  its step-1/step-2 busy-fraction breakdown.

The closed forms and the SHS route are implemented independently so they
can check each other; the test suite holds them to 1e-10 agreement.

Two catalog notes:

* The preemptive series model ("mm1star") uses the two-server line-network
  bookkeeping in which the age delivered to server 2 is counted from the
  handoff instant, so its average age is 1/mu1 + 1/mu2.
* For "pcaf" the stationary distribution implied by its chain (state 1
  leaves at rate 2*mu1) is (1, 2*rho)/(1 + 2*rho).  The busy fractions
  below are derived from that distribution, which is also the one
  consistent with the policy's closed-form age.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

from .shs import ZERO, RateSpec, ResetMap, ShsModel, Transition

__all__ = [
    "Policy",
    "Family",
    "RatePair",
    "PwpaBreakdown",
    "POLICY_NAMES",
    "parse_policy",
    "build_model",
    "closed_form_age",
    "age_factor",
    "pwpa",
    "busy_fractions",
    "pwpa_total",
]

ArrayLike = Union[float, np.ndarray]


class Family(enum.Enum):
    SERIES = "series"
    PARALLEL = "parallel"


class Policy(enum.Enum):
    """The seven shipped policies, keyed by their canonical CLI/JSON names."""

    MM1_STAR = "mm1star"
    MM12_STAR = "mm12star"
    MM11 = "mm11"
    SSS = "sss"
    PSSS = "psss"
    PCAF = "pcaf"
    PSIU = "psiu"

    @property
    def family(self) -> Family:
        if self in (Policy.MM1_STAR, Policy.MM12_STAR, Policy.MM11, Policy.SSS):
            return Family.SERIES
        return Family.PARALLEL

    @property
    def processor_count(self) -> int:
        # Series policies occupy one two-server pipeline; parallel policies
        # use two full servers.  Either way two physical processors exist.
        return 2


POLICY_NAMES: tuple[str, ...] = tuple(p.value for p in Policy)


def parse_policy(name: str) -> Policy:
    """Resolve a canonical policy name (case-insensitive)."""
    try:
        return Policy(name.strip().lower())
    except ValueError:
        valid = ", ".join(POLICY_NAMES)
        raise ValueError(f"unknown policy {name!r}; valid names: {valid}") from None


@dataclass(frozen=True)
class RatePair:
    """Step-2 service rate and the step-1/step-2 rate ratio rho = mu1/mu2."""

    mu2: float
    rho: float

    def __post_init__(self) -> None:
        if self.mu2 <= 0 or self.rho <= 0:
            raise ValueError(f"mu2 and rho must be positive, got {self}")

    @property
    def mu1(self) -> float:
        return self.rho * self.mu2


@dataclass(frozen=True)
class PwpaBreakdown:
    """Average busy processors per step and the power-weighted total."""

    n1_bar: float
    n2_bar: float
    n_bar: float


def _series_preemptive_table() -> tuple[Transition, ...]:
    # Ages (x0, x1, x2): monitor, server-1 update, in-service update at
    # server 2.  Handoffs enter service fresh; preemption discards the
    # in-service update.
    m1 = RateSpec(1, "mu1")
    m2 = RateSpec(1, "mu2")
    return (
        Transition(0, 1, m1, ResetMap((0, ZERO, ZERO))),
        Transition(1, 1, m1, ResetMap((0, ZERO, ZERO))),
        Transition(1, 0, m2, ResetMap((2, 1, 2))),
    )


def build_model(policy: Policy) -> ShsModel:
    """Exact SHS table for a policy (rates stay symbolic: mu1/mu2)."""
    m1 = RateSpec(1, "mu1")
    m2 = RateSpec(1, "mu2")
    if policy is Policy.MM1_STAR:
        return ShsModel(
            states=("0", "1"),
            age_dim=3,
            transitions=_series_preemptive_table(),
            activity=((1, 0), (1, 1)),
        )
    if policy is Policy.MM12_STAR:
        # Ages (x0, x1, x2, x3): monitor, server 1, server 2, waiting room.
        return ShsModel(
            states=("0", "1", "2"),
            age_dim=4,
            transitions=(
                Transition(0, 1, m1, ResetMap((0, ZERO, 1, 1))),
                Transition(1, 0, m2, ResetMap((2, 1, 2, 3))),
                Transition(1, 2, m1, ResetMap((0, ZERO, 2, 1))),
                Transition(2, 2, m1, ResetMap((0, ZERO, 2, 1))),
                Transition(2, 1, m2, ResetMap((2, 1, 3, 3))),
            ),
            activity=((1, 0), (1, 1), (1, 1)),
        )
    if policy is Policy.MM11:
        # Arrivals finding server 2 busy are discarded (x2 unchanged).
        return ShsModel(
            states=("0", "1"),
            age_dim=3,
            transitions=(
                Transition(0, 1, m1, ResetMap((0, ZERO, 1))),
                Transition(1, 1, m1, ResetMap((0, ZERO, 2))),
                Transition(1, 0, m2, ResetMap((2, 1, 2))),
            ),
            activity=((1, 0), (1, 1)),
        )
    if policy is Policy.SSS:
        # One update in flight; a fresh one is generated at delivery.
        return ShsModel(
            states=("1", "2"),
            age_dim=3,
            transitions=(
                Transition(0, 1, m1, ResetMap((0, 1, 1))),
                Transition(1, 0, m2, ResetMap((2, ZERO, 2))),
            ),
            activity=((1, 0), (0, 1)),
        )
    if policy is Policy.PSSS:
        # States (i,j): current step of server 1 and server 2.  Ages
        # (x0, x1, x2, x3, x4, x5) with x3 = min(x0,x1), x4 = min(x0,x2),
        # x5 = min(x0,x1,x2) tracked so stale deliveries merge correctly.
        ident = ResetMap.identity(6)
        srv1_done = ResetMap((3, ZERO, 2, ZERO, 5, ZERO))
        srv2_done = ResetMap((4, 1, ZERO, 5, ZERO, ZERO))
        return ShsModel(
            states=("(1,1)", "(1,2)", "(2,1)", "(2,2)"),
            age_dim=6,
            transitions=(
                Transition(0, 2, m1, ident),
                Transition(0, 1, m1, ident),
                Transition(1, 3, m1, ident),
                Transition(2, 3, m1, ident),
                Transition(2, 0, m2, srv1_done),
                Transition(3, 1, m2, srv1_done),
                Transition(1, 0, m2, srv2_done),
                Transition(3, 2, m2, srv2_done),
            ),
            activity=((2, 0), (1, 1), (1, 1), (0, 2)),
        )
    if policy is Policy.PCAF:
        # State 1: both servers on step 1 of the shared freshest update.
        # State 2: one server on step 2, the other on step 1.
        return ShsModel(
            states=("1", "2"),
            age_dim=3,
            transitions=(
                Transition(0, 1, RateSpec(2, "mu1"), ResetMap((0, ZERO, 1))),
                Transition(1, 1, m1, ResetMap((0, ZERO, 1))),
                Transition(1, 0, m2, ResetMap((2, ZERO, 2))),
            ),
            activity=((2, 0), (1, 1)),
        )
    if policy is Policy.PSIU:
        # Both servers share one update; each step completes at twice the
        # per-server rate.
        return ShsModel(
            states=("1", "2"),
            age_dim=2,
            transitions=(
                Transition(0, 1, RateSpec(2, "mu1"), ResetMap((0, 1))),
                Transition(1, 0, RateSpec(2, "mu2"), ResetMap((1, ZERO))),
            ),
            activity=((2, 0), (0, 2)),
        )
    raise ValueError(f"unhandled policy {policy}")


def age_factor(policy: Policy, rho: ArrayLike) -> ArrayLike:
    """Dimensionless age factor f(rho); average age is f(rho) / mu2."""
    r = np.asarray(rho, dtype=float) if isinstance(rho, np.ndarray) else rho
    if policy is Policy.MM1_STAR:
        return 1.0 + 1.0 / r
    if policy is Policy.MM12_STAR:
        return (
            2.0 / r
            + 2.0 * r**2 / (1.0 + r + r**2)
            + (1.0 + 2.0 * r) * (1.0 + 3.0 * r + r**2) / (1.0 + r) ** 4
        )
    if policy is Policy.MM11:
        return 2.0 * (1.0 + 1.0 / r)
    if policy is Policy.SSS:
        return 2.0 + 1.0 / r + 1.0 / (r * (1.0 + r))
    if policy is Policy.PSSS:
        return (
            1.0
            + 1.0 / r
            + (1.0 + r + r**2) / (4.0 * r * (1.0 + r))
            + r * (1.0 + 2.0 * r) * (2.0 + r) / (4.0 * (1.0 + r) ** 5)
        )
    if policy is Policy.PCAF:
        return (
            3.0 / (2.0 * (1.0 + r))
            + 2.0 * r / (1.0 + 2.0 * r)
            + (1.0 + r + r**2) / (r * (1.0 + r) ** 2)
        )
    if policy is Policy.PSIU:
        return 1.0 + (1.0 / (2.0 * r)) * (1.0 + 1.0 / (1.0 + r))
    raise ValueError(f"unhandled policy {policy}")


def closed_form_age(policy: Policy, rates: RatePair) -> float:
    """Published average age at the monitor, evaluated at (mu2, rho)."""
    return float(age_factor(policy, rates.rho)) / rates.mu2


def busy_fractions(policy: Policy, rho: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
    """Average number of processors busy on step 1 and step 2."""
    r = rho
    one = np.ones_like(r) if isinstance(r, np.ndarray) else 1.0
    if policy in (Policy.MM1_STAR, Policy.MM11):
        return one, r / (1.0 + r)
    if policy is Policy.MM12_STAR:
        return one, r * (1.0 + r) / (1.0 + r + r**2)
    if policy is Policy.SSS:
        return 1.0 / (1.0 + r), r / (1.0 + r)
    if policy in (Policy.PSSS, Policy.PSIU):
        return 2.0 / (1.0 + r), 2.0 * r / (1.0 + r)
    if policy is Policy.PCAF:
        return 2.0 * (1.0 + r) / (1.0 + 2.0 * r), 2.0 * r / (1.0 + 2.0 * r)
    raise ValueError(f"unhandled policy {policy}")


def pwpa_total(policy: Policy, rho: ArrayLike, alpha: float) -> ArrayLike:
    """Power-weighted processor activity rho^alpha * N1 + N2."""
    n1, n2 = busy_fractions(policy, rho)
    return rho**alpha * n1 + n2


def pwpa(policy: Policy, rho: float, alpha: float = 5.0) -> PwpaBreakdown:
    """Busy-fraction breakdown and power-weighted activity at one rho."""
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    n1, n2 = busy_fractions(policy, float(rho))
    return PwpaBreakdown(
        n1_bar=float(n1),
        n2_bar=float(n2),
        n_bar=float(rho**alpha * n1 + n2),
    )
