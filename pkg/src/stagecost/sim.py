"""Event-driven simulation of the SSD staging tier.

The tier is modelled as three work-conserving stations fed by fixed-tick
data generation:

* ``ssd_ingest``  - staging node output, rate ``bw_host2ssd``
* ``ssd_analyze`` - flash -> controller -> memory -> kernel pipeline,
  rate ``1 / (1/bw_fm2c + 1/bw_c2m + 1/t_ssd_k)``
* ``ssd_drain``   - writing to the PFS at the tier's ``S * bw_pfs / N`` share

Busy seconds are integrated from the event schedule (idle->busy and
busy->idle transitions), not taken from the closed-form model, which is what
makes this module a usable cross-check for it.  Energies are exactly
``p_ssd_busy * busy_seconds``.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from . import energy
from .config import SystemConfig, Workload, validate
from .errors import InfeasibleConfig, NonPositiveTick

EVENT_KINDS = ("generation_tick", "stage_complete", "analyze_complete", "drain_complete")
_RANK = {kind: i for i, kind in enumerate(EVENT_KINDS)}

#: SimReport term -> closed-form term it must agree with.
TERM_TO_ANALYTIC = {
    "ssd_ingest": "e_node2ssd",
    "ssd_analyze": "e_active_ssd",
    "ssd_drain": "e_ssd2pfs",
}


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    payload_mb: float


@dataclass(frozen=True)
class SimReport:
    busy_seconds: dict[str, float]
    energies: dict[str, float]
    backlog_mb_max: float
    completed: bool
    events: tuple[SimEvent, ...]


@dataclass(frozen=True)
class DiscrepancyReport:
    relative: dict[str, float]
    tolerance: float
    passed: bool
    failed_terms: tuple[str, ...]


class _Station:
    """Single FIFO server with a fixed service rate (MB/s)."""

    def __init__(self, rate: float):
        self.rate = rate
        self.queue: deque = deque()
        self.busy = False
        self.busy_since = 0.0
        self.busy_seconds = 0.0
        self.current_end = 0.0
        self.queued_mb = 0.0

    def remaining_mb(self, now: float) -> float:
        """Fluid amount not yet served at time ``now`` (service runs continuously)."""
        in_service = (self.current_end - now) * self.rate if self.busy else 0.0
        return self.queued_mb + max(0.0, in_service)


def simulate(cfg: SystemConfig, wl: Workload, kernel: str, tick: float) -> SimReport:
    """Run the tier for ``tsim`` seconds of generation at the given tick.

    ``tick`` must be positive and divide ``tsim``.  Generation happens at the
    start of each interval; the run itself continues past ``tsim`` until all
    queues drain, so busy seconds always cover the whole workload.
    """
    if tick <= 0:
        raise NonPositiveTick(f"tick must be > 0, got {tick!r}")
    k = wl.kernel(kernel)
    n_ticks = round(cfg.tsim / tick)
    if n_ticks < 1 or abs(n_ticks * tick - cfg.tsim) > 1e-9 * cfg.tsim:
        raise ValueError(f"tick {tick!r} does not divide tsim {cfg.tsim!r}")

    rates = {
        "ssd_ingest": cfg.bw_host2ssd,
        "ssd_analyze": 1.0 / (1.0 / cfg.bw_fm2c + 1.0 / cfg.bw_c2m + 1.0 / k.t_ssd_k),
        "ssd_drain": cfg.staging_ssds * cfg.bw_pfs / cfg.compute_nodes,
    }
    stations = {name: _Station(rate) for name, rate in rates.items()}

    analysis_per_tick = cfg.compute_nodes * wl.lambda_a * tick
    checkpoint_per_tick = cfg.compute_nodes * wl.lambda_c * tick
    batch_mb = analysis_per_tick + checkpoint_per_tick

    # Heap entries: (time, kind rank, sequence number, payload).  The payload
    # of a stage completion is the (analysis, checkpoint) pair of its batch.
    heap: list = []
    seq = 0

    def push(time, kind, payload):
        nonlocal seq
        heapq.heappush(heap, (time, _RANK[kind], seq, kind, payload))
        seq += 1

    def enqueue(name, when, payload, amount_mb):
        """Add work to a station, starting service immediately if it is idle."""
        st = stations[name]
        if amount_mb <= 0:
            return
        if st.busy:
            st.queue.append((payload, amount_mb))
            st.queued_mb += amount_mb
        else:
            st.busy = True
            st.busy_since = when
            st.current_end = when + amount_mb / st.rate
            push(st.current_end, _COMPLETION[name], payload)

    def finish_service(name, when):
        """Account for a completion; start the next queued batch if any."""
        st = stations[name]
        if st.queue:
            payload, amount_mb = st.queue.popleft()
            st.queued_mb -= amount_mb
            st.current_end = when + amount_mb / st.rate
            push(st.current_end, _COMPLETION[name], payload)
        else:
            st.busy = False
            st.busy_seconds += when - st.busy_since

    for i in range(n_ticks):
        push(i * tick, "generation_tick", batch_mb)

    events: list[SimEvent] = []
    backlog_max = 0.0
    last_stage_time = 0.0
    # Below this, a pre-arrival queue level is float dust, not real backlog.
    dust = 1e-9 * max(batch_mb, 1.0)

    while heap:
        when, _, _, kind, payload = heapq.heappop(heap)
        if kind == "generation_tick":
            backlog = stations["ssd_ingest"].remaining_mb(when)
            if backlog > dust:
                backlog_max = max(backlog_max, backlog)
            events.append(SimEvent(when, kind, payload))
            enqueue("ssd_ingest", when, (analysis_per_tick, checkpoint_per_tick), payload)
        elif kind == "stage_complete":
            analysis_mb, checkpoint_mb = payload
            events.append(SimEvent(when, kind, analysis_mb + checkpoint_mb))
            last_stage_time = when
            finish_service("ssd_ingest", when)
            enqueue("ssd_analyze", when, analysis_mb, analysis_mb)
            enqueue("ssd_drain", when, checkpoint_mb, checkpoint_mb)
        elif kind == "analyze_complete":
            events.append(SimEvent(when, kind, payload))
            finish_service("ssd_analyze", when)
            enqueue("ssd_drain", when, wl.alpha * payload, wl.alpha * payload)
        else:  # drain_complete
            events.append(SimEvent(when, kind, payload))
            finish_service("ssd_drain", when)

    overrun = last_stage_time - cfg.tsim
    completed = overrun <= 1e-9 * cfg.tsim
    if not completed:
        # After the final arrival the ingest server works without a break,
        # so the leftover at tsim is just the overrun times the rate.
        backlog_max = max(backlog_max, overrun * rates["ssd_ingest"])

    busy = {name: stations[name].busy_seconds for name in rates}
    return SimReport(
        busy_seconds=busy,
        energies={name: cfg.p_ssd_busy * busy[name] for name in rates},
        backlog_mb_max=backlog_max,
        completed=completed,
        events=tuple(events),
    )


_COMPLETION = {
    "ssd_ingest": "stage_complete",
    "ssd_analyze": "analyze_complete",
    "ssd_drain": "drain_complete",
}


def compare_energies(
    sim_energies: dict[str, float], analytic: dict[str, float], tol: float
) -> DiscrepancyReport:
    """Relative per-term gap between simulated and closed-form busy energies."""
    relative = {}
    for term in TERM_TO_ANALYTIC:
        a = analytic[term]
        s = sim_energies[term]
        scale = max(abs(a), abs(s))
        relative[term] = abs(s - a) / scale if scale > 0 else 0.0
    failed = tuple(t for t, r in relative.items() if r > tol)
    return DiscrepancyReport(
        relative=relative, tolerance=tol, passed=not failed, failed_terms=failed
    )


def validate_against_analytic(
    cfg: SystemConfig, wl: Workload, kernel: str, tol: float = 1e-9, ticks: int = 50
) -> DiscrepancyReport:
    """Cross-check the closed-form busy terms against a simulation run.

    Only feasible configs qualify: with a growing staging backlog the two
    sides measure different things, so the check refuses to run.  Idle
    energy is excluded; it is a budget remainder, not a busy term.
    """
    report = validate(cfg, wl)
    if not report.feasible:
        raise InfeasibleConfig(
            "generation outruns bw_host2ssd; busy terms are not comparable"
        )
    sim = simulate(cfg, wl, kernel, tick=cfg.tsim / ticks)
    analytic = {
        "ssd_ingest": energy.e_node2ssd(cfg, wl),
        "ssd_analyze": energy.e_active_ssd(cfg, wl, kernel),
        "ssd_drain": energy.e_ssd2pfs(cfg, wl),
    }
    return compare_energies(sim.energies, analytic, tol)


def write_trace(report: SimReport, path: str) -> None:
    """Dump the event log as TSV (time, kind, payload_mb)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time\tkind\tpayload_mb\n")
        for ev in report.events:
            fh.write(f"{ev.time!r}\t{ev.kind}\t{ev.payload_mb!r}\n")
