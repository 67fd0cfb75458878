"""Monte-Carlo simulation of the seven policies with exponential step times.

The simulator is the independent check on every analytic result: it drives
each policy's actual server dynamics (handoffs, preemptions, discards,
parallel merges) rather than integrating the SHS equations.  It reports the
time-average monitor age with a batch-means confidence interval, empirical
busy fractions, consumed power, and a decomposition of that power by the
fate of the update each busy-second was spent on.

Determinism: replication ``r`` draws from a dedicated stream seeded with
``SeedSequence(entropy=master_seed, spawn_key=(r,))``; results are merged
by replication index, so identical ``(master_seed, config)`` inputs yield
identical output no matter how replications are scheduled.

Measurement protocol: the first ``warmup_fraction`` of the delivery horizon
is discarded; the remainder is split into ``batch_count`` equal-count
delivery batches.  The mean age is the average of the batch means pooled
over replications, with a Student-t 95% half-width.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy import stats

from . import _kernels
from ._kernels import (
    KIND_ABANDON_STEP1,
    KIND_DELIVERY,
    KIND_DISCARD_ARRIVAL,
    KIND_PREEMPT_SERVICE,
    KIND_PREEMPT_WAITING,
    OUT_SIZE,
)
from .optimize import PowerModel
from .policies import Policy, RatePair

__all__ = [
    "SimConfig",
    "SimConfigError",
    "SimResult",
    "EffortDecomposition",
    "EventLog",
    "EVENT_KIND_NAMES",
    "simulate",
    "classify_effort",
    "load_event_log",
]

EVENT_KIND_NAMES = {
    _kernels.KIND_GENERATE: "generate",
    _kernels.KIND_STEP1_DONE: "step1_done",
    _kernels.KIND_SERVE_START: "serve_start",
    _kernels.KIND_DELIVERY: "delivery",
    _kernels.KIND_PREEMPT_SERVICE: "preempt_service",
    _kernels.KIND_DISCARD_ARRIVAL: "discard_arrival",
    _kernels.KIND_PREEMPT_WAITING: "preempt_waiting",
    _kernels.KIND_ABANDON_STEP1: "abandon_step1",
}

_LOG_SCHEMA = "aoipower-event-log"
_LOG_VERSION = 1


class SimConfigError(ValueError):
    """Invalid simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    """Run-length and replication controls.

    ``horizon_events`` counts monitor deliveries per replication (for the
    parallel policies this includes deliveries that arrive too stale to
    reduce the age).  The first ``warmup_fraction`` of them is discarded
    before any statistic accumulates.
    """

    horizon_events: int = 10_000_000
    warmup_fraction: float = 0.1
    replications: int = 10
    master_seed: int = 20_240_401
    batch_count: int = 30

    def __post_init__(self) -> None:
        if self.horizon_events < 1:
            raise SimConfigError("horizon_events must be >= 1")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise SimConfigError("warmup_fraction must be in [0, 1)")
        if self.replications < 1:
            raise SimConfigError("replications must be >= 1")
        if self.batch_count < 2:
            raise SimConfigError("batch_count must be >= 2")
        if self.batch_length < 1:
            raise SimConfigError(
                f"horizon of {self.horizon_events} events is too small for "
                f"{self.batch_count} batches after warmup"
            )

    @property
    def warmup_events(self) -> int:
        return int(self.horizon_events * self.warmup_fraction)

    @property
    def batch_length(self) -> int:
        return (self.horizon_events - self.warmup_events) // self.batch_count


@dataclass(frozen=True)
class EffortDecomposition:
    """Consumed power split by the fate of the work it paid for.

    All values are time-average power over the measurement window.
    ``pending`` is work still in flight when the run ended; it belongs to
    neither the useful nor the wasted side.
    """

    useful: float
    preempted_in_service: float
    discarded_on_arrival: float
    preempted_in_waiting: float
    useless_parallel_delivery: float
    pending: float = 0.0

    @property
    def wasted(self) -> float:
        return (
            self.preempted_in_service
            + self.discarded_on_arrival
            + self.preempted_in_waiting
            + self.useless_parallel_delivery
        )

    @property
    def total(self) -> float:
        return self.useful + self.wasted + self.pending

    def as_dict(self) -> dict[str, float]:
        return {
            "useful": self.useful,
            "preempted_in_service": self.preempted_in_service,
            "discarded_on_arrival": self.discarded_on_arrival,
            "preempted_in_waiting": self.preempted_in_waiting,
            "useless_parallel_delivery": self.useless_parallel_delivery,
            "pending": self.pending,
            "wasted": self.wasted,
        }


@dataclass(frozen=True)
class EventLog:
    """Structured event trace of one replication (arrays share one index)."""

    policy: Policy
    mu1: float
    mu2: float
    mean_cycles: float
    alpha: float
    seed: int
    window_start: float
    window_end: float
    t: np.ndarray
    kind: np.ndarray
    server: np.ndarray
    update: np.ndarray
    step: np.ndarray
    x0_before: np.ndarray
    x0_after: np.ndarray
    age: np.ndarray
    s1_seconds: np.ndarray
    s2_seconds: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def records(self) -> Iterator[dict]:
        for i in range(len(self.t)):
            yield {
                "t": float(self.t[i]),
                "kind": EVENT_KIND_NAMES[int(self.kind[i])],
                "server": int(self.server[i]),
                "update": int(self.update[i]),
                "step": int(self.step[i]),
                "x0_before": float(self.x0_before[i]),
                "x0_after": float(self.x0_after[i]),
                "age": float(self.age[i]),
                "s1_seconds": float(self.s1_seconds[i]),
                "s2_seconds": float(self.s2_seconds[i]),
            }

    def to_jsonl(self, path: str | os.PathLike) -> None:
        """Write header line plus one JSON record per event, atomically."""
        header = {
            "schema": _LOG_SCHEMA,
            "version": _LOG_VERSION,
            "policy": self.policy.value,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "mean_cycles": self.mean_cycles,
            "alpha": self.alpha,
            "seed": self.seed,
            "window_start": self.window_start,
            "window_end": self.window_end,
        }
        directory = os.path.dirname(os.fspath(path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(json.dumps(header) + "\n")
                for rec in self.records():
                    fh.write(json.dumps(rec) + "\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def load_event_log(path: str | os.PathLike) -> EventLog:
    """Read a JSONL event log written by :meth:`EventLog.to_jsonl`."""
    kind_codes = {name: code for code, name in EVENT_KIND_NAMES.items()}
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("schema") != _LOG_SCHEMA or header.get("version") != _LOG_VERSION:
            raise ValueError(f"{path}: not a {_LOG_SCHEMA} v{_LOG_VERSION} file")
        rows = [json.loads(line) for line in fh if line.strip()]
    return EventLog(
        policy=Policy(header["policy"]),
        mu1=header["mu1"],
        mu2=header["mu2"],
        mean_cycles=header["mean_cycles"],
        alpha=header["alpha"],
        seed=header["seed"],
        window_start=header["window_start"],
        window_end=header["window_end"],
        t=np.array([r["t"] for r in rows]),
        kind=np.array([kind_codes[r["kind"]] for r in rows], dtype=np.int32),
        server=np.array([r["server"] for r in rows], dtype=np.int32),
        update=np.array([r["update"] for r in rows], dtype=np.int64),
        step=np.array([r["step"] for r in rows], dtype=np.int32),
        x0_before=np.array([r["x0_before"] for r in rows]),
        x0_after=np.array([r["x0_after"] for r in rows]),
        age=np.array([r["age"] for r in rows]),
        s1_seconds=np.array([r["s1_seconds"] for r in rows]),
        s2_seconds=np.array([r["s2_seconds"] for r in rows]),
    )


@dataclass(frozen=True)
class SimResult:
    """Aggregated simulation output (see module docstring for protocol)."""

    policy: Policy
    mu1: float
    mu2: float
    mean_age: float
    ci_half_width: float
    n1_bar_hat: float
    n2_bar_hat: float
    power_hat: float
    wasted_power_hat: float
    useful_delivery_fraction: float
    breakdown: EffortDecomposition
    deliveries: int
    transitions: int
    sim_time: float
    replications: int
    master_seed: int
    event_logs: tuple[EventLog, ...] = field(default=(), repr=False)


def _replication_seed(master_seed: int, replication: int) -> int:
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(replication,))
    return int(seq.generate_state(1, np.uint32)[0])


def _log_capacity(policy: Policy, deliveries: int, rho: float) -> int:
    # Generous upper bound on records per delivery; overflow is detected
    # and reported rather than silently truncated.
    per_delivery = 8.0 + 6.0 * rho
    cap = 1024 + int(1.25 * deliveries * per_delivery)
    if cap > 60_000_000:
        raise SimConfigError(
            "event logging at this horizon would need more than 60M records; "
            "lower horizon_events for logged runs"
        )
    return cap


def simulate(
    policy: Policy,
    rates: RatePair,
    power: PowerModel | None = None,
    config: SimConfig | None = None,
    collect_log: bool = False,
) -> SimResult:
    """Run the event-driven simulation for one policy at fixed rates.

    ``power`` supplies the per-cycle workload and exponent used to convert
    busy time into consumed power (its budget field plays no role here).
    With ``collect_log=True`` the full event trace of replication 0 is
    attached to the result; reserve that for short horizons.  Logging does
    not perturb the random streams, so results are identical either way.
    """
    power = power if power is not None else PowerModel()
    config = config if config is not None else SimConfig()
    kernel = _kernels.KERNELS[policy.value]
    warmup = config.warmup_events
    batch_len = config.batch_length
    n_batches = config.batch_count

    empty_f = np.empty(0, dtype=np.float64)
    empty_i32 = np.empty(0, dtype=np.int32)
    empty_i64 = np.empty(0, dtype=np.int64)

    outs = []
    batch_means = []
    logs: list[EventLog] = []
    for rep in range(config.replications):
        seed = _replication_seed(config.master_seed, rep)
        out = np.zeros(OUT_SIZE)
        bsums = np.zeros(n_batches)
        bdurs = np.zeros(n_batches)
        if collect_log:
            cap = _log_capacity(policy, warmup + batch_len * n_batches, rates.rho)
            lt = np.zeros(cap)
            lk = np.zeros(cap, dtype=np.int32)
            lsv = np.zeros(cap, dtype=np.int32)
            lu = np.zeros(cap, dtype=np.int64)
            lst = np.zeros(cap, dtype=np.int32)
            lxb = np.zeros(cap)
            lxa = np.zeros(cap)
            lag = np.zeros(cap)
            ls1 = np.zeros(cap)
            ls2 = np.zeros(cap)
        else:
            lt = lxb = lxa = lag = ls1 = ls2 = empty_f
            lk = lsv = lst = empty_i32
            lu = empty_i64
        kernel(
            seed, rates.mu1, rates.mu2, warmup, batch_len, n_batches,
            out, bsums, bdurs, collect_log,
            lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2,
        )
        if collect_log:
            n = int(out[21])
            if n > len(lt):
                raise RuntimeError(
                    f"event log capacity exceeded ({n} > {len(lt)} records)"
                )
            logs.append(
                EventLog(
                    policy=policy,
                    mu1=rates.mu1,
                    mu2=rates.mu2,
                    mean_cycles=power.mean_cycles,
                    alpha=power.alpha,
                    seed=seed,
                    window_start=float(out[1]),
                    window_end=float(out[0]),
                    t=lt[:n].copy(),
                    kind=lk[:n].copy(),
                    server=lsv[:n].copy(),
                    update=lu[:n].copy(),
                    step=lst[:n].copy(),
                    x0_before=lxb[:n].copy(),
                    x0_after=lxa[:n].copy(),
                    age=lag[:n].copy(),
                    s1_seconds=ls1[:n].copy(),
                    s2_seconds=ls2[:n].copy(),
                )
            )
        outs.append(out)
        batch_means.append(bsums / bdurs)

    out_sum = np.sum(outs, axis=0)
    duration = sum(o[0] - o[1] for o in outs)
    means = np.concatenate(batch_means)
    mean_age = float(means.mean())
    if len(means) > 1:
        tcrit = float(stats.t.ppf(0.975, len(means) - 1))
        half = tcrit * float(means.std(ddof=1)) / len(means) ** 0.5
    else:  # pragma: no cover - batch_count >= 2 is enforced
        half = float("nan")

    n1_hat = float(out_sum[3] / duration)
    n2_hat = float(out_sum[4] / duration)
    e1 = (power.mean_cycles * rates.mu1) ** power.alpha
    e2 = (power.mean_cycles * rates.mu2) ** power.alpha
    power_hat = e1 * n1_hat + e2 * n2_hat

    def bucket(i1: int, i2: int) -> float:
        return float((e1 * out_sum[i1] + e2 * out_sum[i2]) / duration)

    breakdown = EffortDecomposition(
        useful=bucket(7, 8),
        preempted_in_service=bucket(9, 10),
        discarded_on_arrival=bucket(11, 12),
        preempted_in_waiting=bucket(13, 14),
        useless_parallel_delivery=bucket(15, 16),
        pending=bucket(17, 18),
    )
    deliveries = int(out_sum[5])
    return SimResult(
        policy=policy,
        mu1=rates.mu1,
        mu2=rates.mu2,
        mean_age=mean_age,
        ci_half_width=float(half),
        n1_bar_hat=n1_hat,
        n2_bar_hat=n2_hat,
        power_hat=float(power_hat),
        wasted_power_hat=float(breakdown.wasted),
        useful_delivery_fraction=float(out_sum[6] / deliveries),
        breakdown=breakdown,
        deliveries=deliveries,
        transitions=int(out_sum[20]),
        sim_time=float(duration),
        replications=config.replications,
        master_seed=config.master_seed,
        event_logs=tuple(logs),
    )


_FATE_KINDS = {
    KIND_DELIVERY,
    KIND_PREEMPT_SERVICE,
    KIND_DISCARD_ARRIVAL,
    KIND_PREEMPT_WAITING,
    KIND_ABANDON_STEP1,
}


def classify_effort(policy: Policy, event_log: EventLog) -> EffortDecomposition:
    """Rebuild the wasted-power decomposition from an event log.

    Each fate record carries the busy-seconds the finished or discarded
    update consumed inside the measurement window; this sums them per
    category and converts to time-average power.  Work of updates that
    never resolved before the log ended is not visible here, so the
    ``pending`` slot is zero.
    """
    if event_log is None:
        raise ValueError("event_log is required; run simulate(collect_log=True)")
    if event_log.policy is not policy:
        raise ValueError(
            f"event log was produced by {event_log.policy.value!r}, not {policy.value!r}"
        )
    duration = event_log.window_end - event_log.window_start
    if duration <= 0:
        raise ValueError("event log has an empty measurement window")
    e1 = (event_log.mean_cycles * event_log.mu1) ** event_log.alpha
    e2 = (event_log.mean_cycles * event_log.mu2) ** event_log.alpha

    secs = {k: [0.0, 0.0] for k in ("useful", "ps", "da", "pw", "up")}
    in_window = event_log.t > event_log.window_start
    for i in np.nonzero(in_window)[0]:
        kind = int(event_log.kind[i])
        if kind not in _FATE_KINDS:
            continue
        if kind == KIND_DELIVERY:
            key = "useful" if event_log.x0_after[i] < event_log.x0_before[i] else "up"
        elif kind == KIND_PREEMPT_SERVICE or kind == KIND_ABANDON_STEP1:
            key = "ps"
        elif kind == KIND_DISCARD_ARRIVAL:
            key = "da"
        else:
            key = "pw"
        secs[key][0] += float(event_log.s1_seconds[i])
        secs[key][1] += float(event_log.s2_seconds[i])

    def to_power(key: str) -> float:
        return (e1 * secs[key][0] + e2 * secs[key][1]) / duration

    return EffortDecomposition(
        useful=to_power("useful"),
        preempted_in_service=to_power("ps"),
        discarded_on_arrival=to_power("da"),
        preempted_in_waiting=to_power("pw"),
        useless_parallel_delivery=to_power("up"),
        pending=0.0,
    )
