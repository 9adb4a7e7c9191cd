"""Tabu search over critical-block neighbourhoods.

Each iteration builds the candidate moves of the incumbent, ranks them by
their makespan estimate, takes the best one that is not tabu (or beats the
best makespan so far) and re-evaluates the result exactly.  After
``improve_iter`` iterations without a new best, a random candidate replaces
the chosen one.  The tabu list stores machine segments: a move is forbidden
while it would recreate a recently abandoned arrangement at the same
positions.

Randomness: ``config.seed`` seeds one :class:`numpy.random.Generator` per run.
It draws the initial schedule, then one 31-bit integer that seeds the
compiled loop's generator.  Runs with equal instance and config are
bit-for-bit reproducible when they stop on iterations or target (a time
limit makes the stopping point machine-dependent).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .instance_io import Instance, simple_lower_bound
from .neighborhood import Move, NeighborhoodKind
from .schedule import Solution, evaluate

log = logging.getLogger(__name__)

TRACE_CAPACITY = 1 << 14


class EmptyNeighborhood(RuntimeError):
    """No candidate move exists for the current schedule."""


class SearchInvariantError(AssertionError):
    """The search produced an infeasible incumbent (a bug, never expected)."""


@dataclass(frozen=True)
class SearchConfig:
    neighborhood: NeighborhoodKind = NeighborhoodKind.N8
    max_iters: int = 50_000_000
    improve_iter: int = 200
    seed: int = 0
    time_limit: float | None = None
    # stop as soon as this makespan is reached; None -> simple lower bound
    target: int | None = None
    # random subset of this many candidates per iteration; None -> all
    children_cap: int | None = None
    outside_window: int | None = None
    exact_ranking: bool = False
    all_critical_paths: bool = False
    # None -> clip N8 only
    clip: bool | None = None
    # override of the tenure base L
    tenure: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "neighborhood", NeighborhoodKind(self.neighborhood))
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.improve_iter < 1:
            raise ValueError("improve_iter must be >= 1")
        if self.children_cap is not None and self.children_cap < 1:
            raise ValueError("children_cap must be >= 1")
        if self.outside_window is not None and self.outside_window < 1:
            raise ValueError("outside_window must be >= 1")


@dataclass
class SearchStats:
    best_makespan: int
    best_solution: Solution
    initial_makespan: int
    iterations: int
    improving_steps: int
    restarts: int
    wall_time: float
    iteration_of_best: int
    time_to_best: float
    stop_reason: str
    target: int
    exact_span_fallbacks: int = 0
    # (iteration, makespan) of every new best, starting with the initial schedule
    trace: list[tuple[int, int]] = field(default_factory=list)


def tenure_base(n: int, m: int) -> int:
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    return 10 + n // m


def tenure_range(n: int, m: int, base: int | None = None) -> tuple[int, int]:
    L = tenure_base(n, m) if base is None else base
    return L, (3 * L) // 2


def initial_solution(inst: Instance, rng: np.random.Generator) -> Solution:
    """Random active schedule (Giffler-Thompson with uniform choice in the conflict set)."""
    routes = inst.routes
    n = inst.num_jobs
    nxt = [0] * n
    job_ready = [0] * n
    mach_ready = [0] * inst.num_machines
    seqs: list[list] = [[] for _ in range(inst.num_machines)]
    for _ in range(inst.num_ops):
        ec_min, mstar = None, -1
        for j in range(n):
            if nxt[j] < len(routes[j]):
                mc, p = routes[j][nxt[j]]
                ec = max(job_ready[j], mach_ready[mc]) + p
                if ec_min is None or ec < ec_min:
                    ec_min, mstar = ec, mc
        conflict = [
            j
            for j in range(n)
            if nxt[j] < len(routes[j])
            and routes[j][nxt[j]][0] == mstar
            and max(job_ready[j], mach_ready[mstar]) < ec_min
        ]
        j = conflict[int(rng.integers(len(conflict)))]
        mc, p = routes[j][nxt[j]]
        end = max(job_ready[j], mach_ready[mc]) + p
        job_ready[j] = mach_ready[mc] = end
        seqs[mc].append((j, nxt[j]))
        nxt[j] += 1
    return Solution.from_lists(seqs)


class TabuList:
    """Recently abandoned machine segments with their expiry iteration."""

    def __init__(self, inst: Instance, tenure_lo: int, tenure_hi: int):
        if not 1 <= tenure_lo <= tenure_hi:
            raise ValueError("need 1 <= tenure_lo <= tenure_hi")
        self.inst = inst
        self.tenure_lo = tenure_lo
        self.tenure_hi = tenure_hi
        size = tenure_hi + 2
        width = max(1, int(inst.arrays.mcount.max()))
        self.mach = np.full(size, -1, np.int64)
        self.start = np.zeros(size, np.int64)
        self.length = np.zeros(size, np.int64)
        self.expires = np.full(size, -1, np.int64)
        self.ops = np.full((size, width), -1, np.int64)
        self._state = np.zeros(K.STATE_SIZE, np.int64)

    @classmethod
    def for_instance(cls, inst: Instance, base: int | None = None) -> "TabuList":
        return cls(inst, *tenure_range(inst.num_jobs, inst.num_machines, base))

    def sample_tenure(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.tenure_lo, self.tenure_hi + 1))

    def record(self, move: Move, solution: Solution, iteration: int, tenure: int) -> None:
        """Forbid recreating the segment ``move`` is about to break up."""
        if not self.tenure_lo <= tenure <= self.tenure_hi:
            raise ValueError(f"tenure {tenure} outside [{self.tenure_lo}, {self.tenure_hi}]")
        seq = solution.sequences[move.machine]
        pu, pv = seq.index(move.u), seq.index(move.v)
        segment = np.array([self.inst.index(op) for op in seq[pu : pv + 1]], np.int64)
        K.record_tabu(move.machine, pu, pv - pu + 1, segment, iteration + tenure, self._state,
                      self.mach, self.start, self.length, self.expires, self.ops)

    def entries(self, iteration: int) -> list[tuple[int, int, tuple, int]]:
        live = []
        for e in range(len(self.mach)):
            if self.mach[e] >= 0 and self.expires[e] >= iteration:
                ops = tuple(self.inst.op_at(int(o)) for o in self.ops[e, : self.length[e]])
                live.append((int(self.mach[e]), int(self.start[e]), ops, int(self.expires[e])))
        return live


def is_tabu(move: Move, solution: Solution, tabu_list: TabuList, iteration: int) -> bool:
    inst = tabu_list.inst
    a = inst.arrays
    seq = solution.to_array(inst)
    n = inst.num_ops
    mpos = np.empty(n, np.int64)
    K.link(seq, a.mcount, mpos, np.empty(n, np.int64), np.empty(n, np.int64))
    return bool(
        K.is_tabu(int(move.kind), inst.index(move.u), inst.index(move.v), seq, a.mach, mpos,
                  iteration, tabu_list.mach, tabu_list.start, tabu_list.length, tabu_list.expires,
                  tabu_list.ops, np.empty(seq.shape[1], np.int64))
    )


@dataclass(frozen=True)
class Candidate:
    move: Move
    estimate: int
    tabu: bool = False


def select_move(children: Sequence[Candidate], best_makespan: int, rng: np.random.Generator) -> Move:
    """Lowest-estimate admissible move; a uniformly random one if none is admissible.

    A move is admissible when it is not tabu or its estimate beats
    ``best_makespan``.  Ties go to the earliest candidate.
    """
    if not children:
        raise EmptyNeighborhood("no candidate moves")
    est = np.array([c.estimate for c in children], np.int64)
    tabu = np.array([c.tabu for c in children], np.bool_)
    i = K.select_index(est, tabu, len(children), best_makespan)
    if i < 0:
        i = int(rng.integers(len(children)))
    return children[i].move


_STOP_REASONS = {
    K.STOP_TARGET: "target",
    K.STOP_ITERS: "max_iters",
    K.STOP_EMPTY: "empty_neighborhood",
    K.STOP_CYCLE: "cycle",
}


def _params(inst: Instance, config: SearchConfig, target: int) -> np.ndarray:
    lo, hi = tenure_range(inst.num_jobs, inst.num_machines, config.tenure)
    clip = config.clip if config.clip is not None else config.neighborhood == NeighborhoodKind.N8
    p = np.zeros(K.PARAMS_SIZE, np.int64)
    p[K.P_KIND] = int(config.neighborhood)
    p[K.P_IMPROVE_ITER] = config.improve_iter
    p[K.P_TEN_LO] = lo
    p[K.P_TEN_HI] = hi
    p[K.P_TARGET] = target
    p[K.P_MAX_ITERS] = config.max_iters
    p[K.P_CAP] = config.children_cap or 0
    p[K.P_WINDOW] = config.outside_window or 0
    p[K.P_EXACT] = int(config.exact_ranking)
    p[K.P_ALL_PATHS] = int(config.all_critical_paths)
    p[K.P_CLIP] = int(clip)
    return p


def run(inst: Instance, config: SearchConfig, initial: Solution | None = None) -> SearchStats:
    """Tabu search from a random active schedule (or ``initial``)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    x0 = initial_solution(inst, rng) if initial is None else initial
    kernel_seed = int(rng.integers(0, 2**31 - 1))
    target = config.target if config.target is not None else simple_lower_bound(inst)
    a = inst.arrays
    data0 = evaluate(inst, x0)

    seq = x0.to_array(inst)
    best_seq = seq.copy()
    params = _params(inst, config, target)
    lo, hi = int(params[K.P_TEN_LO]), int(params[K.P_TEN_HI])
    tabu = TabuList(inst, lo, hi)
    state = np.zeros(K.STATE_SIZE, np.int64)
    state[K.S_BEST] = state[K.S_CUR] = data0.makespan
    trace_it = np.zeros(TRACE_CAPACITY, np.int64)
    trace_mk = np.zeros(TRACE_CAPACITY, np.int64)
    trace_time: list[float] = []

    K.seed_rng(kernel_seed)
    chunk = 64
    status = K.RUNNING
    start = time.perf_counter()
    stopped_on_time = False
    while True:
        it_before = int(state[K.S_IT])
        n_before = int(state[K.S_TRACE_N])
        c0 = time.perf_counter()
        status = K.search_chunk(a.dur, a.mach, a.jprev, a.jnext, seq, a.mcount, best_seq,
                                tabu.mach, tabu.start, tabu.length, tabu.expires, tabu.ops,
                                state, params, chunk, trace_it, trace_mk)
        c1 = time.perf_counter()
        done = int(state[K.S_IT]) - it_before
        # spread the chunk's wall time linearly over its iterations
        for t in range(n_before, int(state[K.S_TRACE_N])):
            frac = (trace_it[t] - it_before) / max(done, 1)
            trace_time.append(c0 - start + frac * (c1 - c0))
        if status != K.RUNNING:
            break
        if config.time_limit is not None and c1 - start >= config.time_limit:
            stopped_on_time = True
            break
        elapsed = c1 - c0
        if elapsed < 0.05:
            chunk = min(chunk * 2, 1 << 20)
        elif elapsed > 0.2 and chunk > 1:
            chunk //= 2
        if config.time_limit is not None and done > 0:
            remaining = config.time_limit - (c1 - start)
            per_iter = elapsed / done
            chunk = max(1, min(chunk, int(remaining / per_iter) + 1))
    wall = time.perf_counter() - t0

    if status == K.STOP_CYCLE:
        raise SearchInvariantError(f"{inst.name}: search produced a cyclic selection")
    best_solution = Solution.from_array(inst, best_seq)
    best_mk = int(state[K.S_BEST])
    check = evaluate(inst, best_solution).makespan
    if check != best_mk:
        raise SearchInvariantError(f"{inst.name}: best makespan {best_mk} re-evaluates to {check}")
    n_trace = int(state[K.S_TRACE_N])
    trace = [(0, data0.makespan)] + [(int(trace_it[t]), int(trace_mk[t])) for t in range(n_trace)]
    time_to_best = trace_time[-1] if trace_time and n_trace == len(trace_time) else 0.0
    if int(state[K.S_IT_BEST]) == 0:
        time_to_best = 0.0
    reason = "time_limit" if stopped_on_time else _STOP_REASONS[status]
    if reason == "empty_neighborhood":
        log.warning("%s: search stopped on an empty neighbourhood", inst.name)
    return SearchStats(
        best_makespan=best_mk,
        best_solution=best_solution,
        initial_makespan=data0.makespan,
        iterations=int(state[K.S_IT]),
        improving_steps=int(state[K.S_IMPROVE]),
        restarts=int(state[K.S_RESTARTS]),
        wall_time=wall,
        iteration_of_best=int(state[K.S_IT_BEST]),
        time_to_best=time_to_best,
        stop_reason=reason,
        target=target,
        exact_span_fallbacks=int(state[K.S_FALLBACKS]),
        trace=trace,
    )


def warm_up() -> None:
    """Compile (or load cached) kernels so later timings exclude JIT work."""
    from .instance_io import builtin_example

    run(builtin_example(), SearchConfig(max_iters=5, target=0, seed=0))
