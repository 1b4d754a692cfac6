"""Slot-level Monte Carlo simulation of UORA and two centralized baselines.

Each slot runs, in order: Bernoulli arrivals (a fresh update replaces the
buffered one), trigger-frame backoff processing, uniform RU selection by the
STAs whose counter is 0, the multi-STA block ack, and the AoI sample.

Random numbers come from ``numpy.random.Philox``; replication ``r`` of a run
seeded with ``s`` uses the ``r``-th child of ``SeedSequence(s)``, so results are
bit-reproducible for a given seed regardless of how replications are
scheduled across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import stats as sstats

from .config import NetworkConfig, build_ladder

POLICIES = ("uora", "round-robin", "max-aoi")
POLICY_ALIASES = {"uora": "uora", "rr": "round-robin", "round-robin": "round-robin",
                  "ma": "max-aoi", "max-aoi": "max-aoi"}

DEFAULT_SLOTS = 1_000_000
DEFAULT_WARMUP = 10_000
DEFAULT_REPLICATIONS = 10

# event vector layout returned by the slot kernels
EV_ACTIVE, EV_ATTEMPTS, EV_SUCCESSES, EV_COLLIDED_RUS, EV_IDLE_RUS, EV_COLLIDED_TX = range(6)
N_EVENTS = 6


@dataclass
class StaStates:
    """Per-STA protocol state as parallel arrays (index = STA)."""

    has_packet: np.ndarray
    birth: np.ndarray
    online: np.ndarray
    level: np.ndarray
    count: np.ndarray
    aoi: np.ndarray
    success: np.ndarray
    slot: int = 0
    cursor: int = 0

    @classmethod
    def initial(cls, n: int) -> "StaStates":
        return cls(
            has_packet=np.zeros(n, dtype=np.bool_),
            birth=np.zeros(n, dtype=np.int64),
            online=np.zeros(n, dtype=np.bool_),
            level=np.zeros(n, dtype=np.int64),
            count=np.zeros(n, dtype=np.int64),
            aoi=np.ones(n, dtype=np.int64),
            success=np.zeros(n, dtype=np.bool_),
        )

    def delta(self) -> np.ndarray:
        """System time of each buffered update (meaningful where has_packet)."""
        return self.slot - self.birth


@numba.njit(cache=True, nogil=True)
def _arrivals(rng, lam, slot, has_packet, birth):
    n = has_packet.shape[0]
    active = 0
    for k in range(n):
        if lam >= 1.0 or rng.random() < lam:
            has_packet[k] = True
            birth[k] = slot
        if has_packet[k]:
            active += 1
    return active


@numba.njit(cache=True, nogil=True)
def _update_aoi(slot, success, birth, aoi):
    for k in range(aoi.shape[0]):
        if success[k]:
            aoi[k] = slot - birth[k] + 1
        else:
            aoi[k] += 1


@numba.njit(cache=True, nogil=True)
def _uora_slot(rng, lam, l, w, m, slot, has_packet, birth, online, level, count, aoi,
               success, ru_load, ru_pick, events):
    n = has_packet.shape[0]
    events[:] = 0
    events[EV_ACTIVE] = _arrivals(rng, lam, slot, has_packet, birth)
    # trigger frame: activate offline counters, then decrement every online one
    for k in range(n):
        success[k] = False
        if has_packet[k] and not online[k]:
            online[k] = True
            level[k] = 0
            count[k] = rng.integers(0, w[0])
        if online[k]:
            if count[k] > l:
                count[k] -= l
            else:
                count[k] = 0
    ru_load[:] = 0
    for k in range(n):
        ru_pick[k] = -1
        if online[k] and count[k] == 0:
            ru = rng.integers(0, l)
            ru_pick[k] = ru
            ru_load[ru] += 1
            events[EV_ATTEMPTS] += 1
    for r in range(l):
        if ru_load[r] == 0:
            events[EV_IDLE_RUS] += 1
        elif ru_load[r] == 1:
            events[EV_SUCCESSES] += 1
        else:
            events[EV_COLLIDED_RUS] += 1
            events[EV_COLLIDED_TX] += ru_load[r]
    # block ack
    for k in range(n):
        ru = ru_pick[k]
        if ru < 0:
            continue
        if ru_load[ru] == 1:
            success[k] = True
            has_packet[k] = False
            online[k] = False
            level[k] = 0
            count[k] = 0
        else:
            nxt = level[k] + 1
            level[k] = nxt if nxt < m else m
            count[k] = rng.integers(0, w[level[k]])
    _update_aoi(slot, success, birth, aoi)


@numba.njit(cache=True, nogil=True)
def schedule_round_robin(cursor, n, l):
    """The ``l`` STA indices following ``cursor`` in circular order."""
    if l > n:
        raise ValueError("round-robin needs l <= n")
    out = np.empty(l, dtype=np.int64)
    for k in range(l):
        out[k] = (cursor + k) % n
    return out


@numba.njit(cache=True, nogil=True)
def schedule_max_aoi(aoi, l):
    """Indices of the ``l`` largest AoI values; ties go to the lowest index."""
    n = aoi.shape[0]
    if l > n:
        raise ValueError("max-AoI needs l <= n")
    taken = np.zeros(n, dtype=np.bool_)
    out = np.empty(l, dtype=np.int64)
    for k in range(l):
        best = -1
        for i in range(n):
            if not taken[i] and (best < 0 or aoi[i] > aoi[best]):
                best = i
        taken[best] = True
        out[k] = best
    return out


@numba.njit(cache=True, nogil=True)
def _scheduled_slot(rng, lam, l, policy, cursor, slot, has_packet, birth, aoi, success, events):
    n = has_packet.shape[0]
    events[:] = 0
    if policy == 1:
        chosen = schedule_round_robin(cursor, n, l)
    else:
        chosen = schedule_max_aoi(aoi, l)
    events[EV_ACTIVE] = _arrivals(rng, lam, slot, has_packet, birth)
    success[:] = False
    for idx in range(l):
        k = chosen[idx]
        if has_packet[k]:
            success[k] = True
            has_packet[k] = False
            events[EV_ATTEMPTS] += 1
            events[EV_SUCCESSES] += 1
        else:
            events[EV_IDLE_RUS] += 1
    _update_aoi(slot, success, birth, aoi)
    return (cursor + l) % n


@numba.njit(cache=True, nogil=True)
def _run(rng, lam, l, w, m, policy, slots, warmup, aoi_sum, hist, totals):
    n = aoi_sum.shape[0]
    has_packet = np.zeros(n, dtype=np.bool_)
    birth = np.zeros(n, dtype=np.int64)
    online = np.zeros(n, dtype=np.bool_)
    level = np.zeros(n, dtype=np.int64)
    count = np.zeros(n, dtype=np.int64)
    aoi = np.ones(n, dtype=np.int64)
    success = np.zeros(n, dtype=np.bool_)
    ru_load = np.zeros(l, dtype=np.int64)
    ru_pick = np.zeros(n, dtype=np.int64)
    events = np.zeros(N_EVENTS, dtype=np.int64)
    cursor = 0
    for slot in range(slots):
        if policy == 0:
            _uora_slot(rng, lam, l, w, m, slot, has_packet, birth, online, level, count, aoi,
                       success, ru_load, ru_pick, events)
        else:
            cursor = _scheduled_slot(rng, lam, l, policy, cursor, slot, has_packet, birth, aoi,
                                     success, events)
        if slot >= warmup:
            for k in range(n):
                aoi_sum[k] += aoi[k]
            hist[events[EV_ACTIVE]] += 1
            for e in range(N_EVENTS):
                totals[e] += events[e]


def _policy_code(policy: str) -> int:
    return POLICIES.index(POLICY_ALIASES[policy])


@dataclass(frozen=True)
class SimConfig:
    network: NetworkConfig
    slots: int = DEFAULT_SLOTS
    warmup: int = DEFAULT_WARMUP
    seed: int = 0
    policy: str = "uora"
    replications: int = DEFAULT_REPLICATIONS
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.slots < 1:
            raise ValueError("slots must be positive")
        if not 0 <= self.warmup < self.slots:
            raise ValueError("warmup must satisfy 0 <= warmup < slots")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        if self.policy not in POLICY_ALIASES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if POLICY_ALIASES[self.policy] != "uora" and self.network.n_rus > self.network.n_stas:
            raise ValueError("centralized baselines need n_rus <= n_stas")
        object.__setattr__(self, "policy", POLICY_ALIASES[self.policy])


@dataclass(frozen=True)
class SimStats:
    mean_aoi_network: float
    mean_aoi_per_sta: np.ndarray
    empirical_q: float
    empirical_rho: float
    active_count_hist: np.ndarray
    successes: int
    collisions: int
    wasted_rus: int
    attempts: int
    collided_transmissions: int
    ci95_mean_aoi: float
    replication_aoi: tuple[float, ...]
    measured_slots: int

    def summary(self) -> dict:
        return {
            "sim_aaoi": self.mean_aoi_network,
            "sim_ci95": self.ci95_mean_aoi,
            "sim_q": self.empirical_q,
            "sim_rho": self.empirical_rho,
            "successes": self.successes,
            "collisions": self.collisions,
            "wasted_rus": self.wasted_rus,
            "attempts": self.attempts,
        }


def replication_rngs(seed: int, replications: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(replications)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def _run_replication(rng, sim: SimConfig):
    net = sim.network
    n = net.n_stas
    w = np.asarray(build_ladder(net).w, dtype=np.int64)
    aoi_sum = np.zeros(n, dtype=np.int64)
    hist = np.zeros(n + 1, dtype=np.int64)
    totals = np.zeros(N_EVENTS, dtype=np.int64)
    _run(rng, float(net.arrival_rate), net.n_rus, w, net.m, _policy_code(sim.policy),
         sim.slots, sim.warmup, aoi_sum, hist, totals)
    return aoi_sum, hist, totals


def run_simulation(sim: SimConfig) -> SimStats:
    rngs = replication_rngs(sim.seed, sim.replications)
    if sim.workers > 1 and sim.replications > 1:
        with ThreadPoolExecutor(max_workers=sim.workers) as pool:
            results = list(pool.map(lambda g: _run_replication(g, sim), rngs))
    else:
        results = [_run_replication(g, sim) for g in rngs]
    measured = sim.slots - sim.warmup
    per_rep = np.array([r[0].sum() / (measured * sim.network.n_stas) for r in results])
    aoi_per_sta = np.sum([r[0] for r in results], axis=0) / (measured * sim.replications)
    hist = np.sum([r[1] for r in results], axis=0).astype(float)
    totals = np.sum([r[2] for r in results], axis=0)
    active_slots = float(np.arange(len(hist)) @ hist)
    hist /= hist.sum()
    attempts = int(totals[EV_ATTEMPTS])
    successes = int(totals[EV_SUCCESSES])
    if sim.replications > 1:
        half = sstats.t.ppf(0.975, sim.replications - 1) * per_rep.std(ddof=1) / math.sqrt(
            sim.replications)
    else:
        half = math.nan
    return SimStats(
        mean_aoi_network=float(per_rep.mean()),
        mean_aoi_per_sta=aoi_per_sta,
        empirical_q=successes / attempts if attempts else math.nan,
        empirical_rho=attempts / active_slots if active_slots else math.nan,
        active_count_hist=hist,
        successes=successes,
        collisions=int(totals[EV_COLLIDED_RUS]),
        wasted_rus=int(totals[EV_IDLE_RUS]),
        attempts=attempts,
        collided_transmissions=int(totals[EV_COLLIDED_TX]),
        ci95_mean_aoi=float(half),
        replication_aoi=tuple(float(v) for v in per_rep),
        measured_slots=measured,
    )


@dataclass(frozen=True)
class SlotEvents:
    active: int
    attempts: int
    successes: int
    collided_rus: int
    idle_rus: int
    collided_transmissions: int
    succeeded: np.ndarray


def step_slot(state: StaStates, rng: np.random.Generator, config: NetworkConfig,
              policy: str = "uora") -> SlotEvents:
    """Advance ``state`` by one slot in place and report what happened."""
    policy = POLICY_ALIASES[policy]
    l = config.n_rus
    events = np.zeros(N_EVENTS, dtype=np.int64)
    lam = float(config.arrival_rate)
    if policy == "uora":
        w = np.asarray(build_ladder(config).w, dtype=np.int64)
        _uora_slot(rng, lam, l, w, config.m, state.slot, state.has_packet,
                   state.birth, state.online, state.level, state.count, state.aoi,
                   state.success, np.zeros(l, dtype=np.int64),
                   np.zeros(config.n_stas, dtype=np.int64), events)
    else:
        state.cursor = _scheduled_slot(rng, lam, l, _policy_code(policy), state.cursor,
                                       state.slot, state.has_packet, state.birth, state.aoi,
                                       state.success, events)
    state.slot += 1
    return SlotEvents(*(int(v) for v in events), succeeded=state.success.copy())
