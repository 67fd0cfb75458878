"""Generic solver for finite stochastic-hybrid-system (SHS) age models.

A model couples a finite continuous-time Markov chain with a vector of age
components that grow at unit rate and are linearly reset when a transition
fires.  Given the transition structure, service rates, and per-state
processor-activity counts, the solver computes the stationary distribution
of the chain and the fixed point of the age-balance equations, whose
monitor component sums to the average age.

Reset maps are restricted to the form found in all shipped policy tables:
every output age component is either zeroed or copied from one input
component.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "ZERO",
    "RateSpec",
    "ResetMap",
    "Transition",
    "ShsModel",
    "AgeSolution",
    "ShsError",
    "validate_model",
    "stationary_distribution",
    "solve_age_balance",
    "average_age",
    "model_to_json",
    "model_from_json",
]

#: Sentinel used in reset maps for "output component is reset to zero".
ZERO = None

_RATE_BASES = ("mu1", "mu2")


class ShsError(ValueError):
    """Raised for invalid models, non-positive rates, or singular systems."""


@dataclass(frozen=True)
class RateSpec:
    """Transition rate ``coefficient * mu1`` or ``coefficient * mu2``."""

    coefficient: int
    base: str  # "mu1" | "mu2"

    def value(self, mu1: float, mu2: float) -> float:
        return self.coefficient * (mu1 if self.base == "mu1" else mu2)


@dataclass(frozen=True)
class ResetMap:
    """Linear age reset, one source designator per output component.

    ``columns[j]`` is either ``ZERO`` (output j is reset to 0) or an input
    component index ``k`` (output j copies input k).  Equivalent to a 0/1
    matrix with at most one 1 per column.
    """

    columns: tuple[int | None, ...]

    @classmethod
    def identity(cls, age_dim: int) -> "ResetMap":
        return cls(tuple(range(age_dim)))

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(len(self.columns), dtype=float)
        for j, src in enumerate(self.columns):
            if src is not None:
                out[j] = v[src]
        return out


@dataclass(frozen=True)
class Transition:
    source: int
    dest: int
    rate: RateSpec
    reset: ResetMap


@dataclass(frozen=True)
class ShsModel:
    """Finite SHS with unit-slope ages and copy-or-zero reset maps.

    Age component 0 is the monitor age.  ``activity[q]`` holds the number
    of processors busy on step 1 and step 2 while the chain sits in state
    ``q``; it drives power accounting but not the age solution.
    """

    states: tuple[str, ...]
    age_dim: int
    transitions: tuple[Transition, ...]
    activity: tuple[tuple[int, int], ...]

    @property
    def n_states(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class AgeSolution:
    """Stationary distribution, age-balance fixed point, and average age."""

    pi: np.ndarray
    v_bar: np.ndarray  # shape (n_states, age_dim)
    delta: float


def validate_model(model: ShsModel) -> list[str]:
    """Return a list of structural violations; an empty list means valid.

    Checks index ranges, rate coefficients, reset-map shape, activity
    counts, and irreducibility of the transition-induced chain.
    """
    issues: list[str] = []
    m = model.n_states
    if m == 0:
        return ["model has no states"]
    if model.age_dim < 1:
        issues.append(f"age_dim must be >= 1, got {model.age_dim}")
    if len(model.activity) != m:
        issues.append(
            f"activity has {len(model.activity)} entries for {m} states"
        )
    for q, counts in enumerate(model.activity):
        if len(counts) != 2 or any(c < 0 for c in counts):
            issues.append(f"activity[{q}] must be a pair of counts >= 0, got {counts}")
    for i, tr in enumerate(model.transitions):
        if not 0 <= tr.source < m:
            issues.append(f"transition {i}: source index {tr.source} out of range")
        if not 0 <= tr.dest < m:
            issues.append(f"transition {i}: dest index {tr.dest} out of range")
        if tr.rate.coefficient < 1:
            issues.append(f"transition {i}: rate coefficient must be >= 1")
        if tr.rate.base not in _RATE_BASES:
            issues.append(f"transition {i}: unknown rate base {tr.rate.base!r}")
        if len(tr.reset.columns) != model.age_dim:
            issues.append(
                f"transition {i}: reset has {len(tr.reset.columns)} columns, "
                f"expected {model.age_dim}"
            )
        for j, src in enumerate(tr.reset.columns):
            if src is not None and not 0 <= src < model.age_dim:
                issues.append(
                    f"transition {i}: reset column {j} copies component {src}, "
                    f"out of range"
                )
    if not issues and not _is_irreducible(model):
        issues.append("transition graph is not irreducible (chain is not ergodic)")
    return issues


def _is_irreducible(model: ShsModel) -> bool:
    m = model.n_states
    if m == 1:
        return True
    rows = [t.source for t in model.transitions if t.source != t.dest]
    cols = [t.dest for t in model.transitions if t.source != t.dest]
    if not rows:
        return False
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))
    n_comp, _ = connected_components(graph, directed=True, connection="strong")
    return n_comp == 1


def _require_valid(model: ShsModel, mu1: float, mu2: float) -> None:
    if mu1 <= 0 or mu2 <= 0:
        raise ShsError(f"service rates must be positive, got mu1={mu1}, mu2={mu2}")
    issues = validate_model(model)
    if issues:
        raise ShsError("invalid model: " + "; ".join(issues))


def stationary_distribution(model: ShsModel, mu1: float, mu2: float) -> np.ndarray:
    """Solve global balance for the embedded Markov chain.

    Self-loops contribute nothing to global balance and are skipped when
    the generator is assembled.
    """
    _require_valid(model, mu1, mu2)
    m = model.n_states
    gen = np.zeros((m, m))
    for tr in model.transitions:
        if tr.source == tr.dest:
            continue
        lam = tr.rate.value(mu1, mu2)
        gen[tr.source, tr.dest] += lam
        gen[tr.source, tr.source] -= lam
    a = gen.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(m)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ShsError(f"stationary distribution solve failed: {exc}") from exc
    residual = np.abs(gen.T @ pi).max()
    if residual > 1e-12 or pi.min() < -1e-12:
        raise ShsError(
            f"stationary distribution failed balance check (residual {residual:.2e})"
        )
    return np.clip(pi, 0.0, None)


def solve_age_balance(model: ShsModel, mu1: float, mu2: float) -> AgeSolution:
    """Solve the age-balance fixed point and return the full solution.

    For every state q the fixed point satisfies

        v_bar[q] * (total rate leaving q)
            = pi[q] * 1  +  sum over transitions l entering q of
              rate(l) * reset_l(v_bar[source(l)])

    where self-loop transitions appear in both the leaving total and the
    entering sum.  The average age is the sum over states of the monitor
    component of ``v_bar``.
    """
    pi = stationary_distribution(model, mu1, mu2)
    m, d = model.n_states, model.age_dim
    rate_out = np.zeros(m)
    for tr in model.transitions:
        rate_out[tr.source] += tr.rate.value(mu1, mu2)
    if (rate_out <= 0).any():
        dead = [model.states[q] for q in np.nonzero(rate_out <= 0)[0]]
        raise ShsError(f"states with no outgoing rate: {dead}")

    n = m * d
    a = np.zeros((n, n))
    b = np.zeros(n)
    for q in range(m):
        idx = slice(q * d, (q + 1) * d)
        a[idx, idx] = np.eye(d) * rate_out[q]
        b[q * d : (q + 1) * d] = pi[q]
    for tr in model.transitions:
        lam = tr.rate.value(mu1, mu2)
        for j, src in enumerate(tr.reset.columns):
            if src is not None:
                a[tr.dest * d + j, tr.source * d + src] -= lam
    try:
        v = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ShsError(
            f"age-balance solve failed for rates mu1={mu1}, mu2={mu2}: {exc}"
        ) from exc
    resid = np.abs(a @ v - b).max() / max(np.abs(b).max(), 1e-300)
    if resid > 1e-10:
        raise ShsError(f"age-balance residual too large: {resid:.2e}")
    v_bar = v.reshape(m, d)
    if v_bar.min() < -1e-10:
        raise ShsError("age-balance fixed point has negative components")
    return AgeSolution(pi=pi, v_bar=np.clip(v_bar, 0.0, None), delta=float(v_bar[:, 0].sum()))


def average_age(solution: AgeSolution) -> float:
    """Average monitor age: sum of component 0 of ``v_bar`` over states."""
    return float(solution.v_bar[:, 0].sum())


# --- JSON interchange -------------------------------------------------------
#
# Schema (version 1):
# {
#   "schema": "aoipower-shs-model",
#   "version": 1,
#   "states": ["0", "1", ...],
#   "age_dim": 4,
#   "transitions": [
#     {"source": 0, "dest": 1,
#      "rate": {"coefficient": 1, "base": "mu1"},
#      "reset": ["zero", 0, 3, ...]}        # one entry per age component
#   ],
#   "activity": [[1, 0], [1, 1], ...]       # [step-1 count, step-2 count]
# }
#
# Reset entries are the literal string "zero" or an input component index.

_SCHEMA_NAME = "aoipower-shs-model"
_SCHEMA_VERSION = 1


def model_to_json(model: ShsModel, indent: int | None = 2) -> str:
    doc = {
        "schema": _SCHEMA_NAME,
        "version": _SCHEMA_VERSION,
        "states": list(model.states),
        "age_dim": model.age_dim,
        "transitions": [
            {
                "source": tr.source,
                "dest": tr.dest,
                "rate": {"coefficient": tr.rate.coefficient, "base": tr.rate.base},
                "reset": ["zero" if c is None else c for c in tr.reset.columns],
            }
            for tr in model.transitions
        ],
        "activity": [list(pair) for pair in model.activity],
    }
    return json.dumps(doc, indent=indent)


def model_from_json(text: str) -> ShsModel:
    """Parse a model document; raises ``ShsError`` on schema problems."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ShsError(f"model document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != _SCHEMA_NAME:
        raise ShsError(f"expected a {_SCHEMA_NAME!r} document")
    if doc.get("version") != _SCHEMA_VERSION:
        raise ShsError(f"unsupported schema version {doc.get('version')!r}")
    try:
        transitions = tuple(
            Transition(
                source=int(t["source"]),
                dest=int(t["dest"]),
                rate=RateSpec(int(t["rate"]["coefficient"]), str(t["rate"]["base"])),
                reset=ResetMap(
                    tuple(None if c == "zero" else int(c) for c in t["reset"])
                ),
            )
            for t in doc["transitions"]
        )
        model = ShsModel(
            states=tuple(str(s) for s in doc["states"]),
            age_dim=int(doc["age_dim"]),
            transitions=transitions,
            activity=tuple((int(a), int(b)) for a, b in doc["activity"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ShsError(f"malformed model document: {exc}") from exc
    issues = validate_model(model)
    if issues:
        raise ShsError("invalid model: " + "; ".join(issues))
    return model
