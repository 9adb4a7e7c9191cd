"""Brute-force ground truth for small instances.

Nothing here touches the compiled kernels, so it can be used to cross-check
them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .instance_io import Instance, simple_lower_bound
from .schedule import CycleError, Solution


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    makespan: int
    explored: int  # complete active schedules reached
    solution: Solution


def brute_force_optimum(inst: Instance, limit: int = 12) -> OracleResult:
    """Exact optimum by enumerating active schedules (Giffler-Thompson branching).

    Branches whose partial makespan already reaches the incumbent are cut; that
    cut never discards a strictly better schedule.
    """
    total = inst.num_ops
    if total > limit:
        raise TooLarge(f"{inst.name}: {total} operations exceeds the oracle limit {limit}")
    routes = inst.routes
    n = inst.num_jobs
    best = [sum(p for r in routes for _, p in r) + 1, 0]
    best_seqs: list = [None]
    lb = simple_lower_bound(inst)

    nxt = [0] * n
    job_ready = [0] * n
    mach_ready = [0] * inst.num_machines
    seqs: list[list] = [[] for _ in range(inst.num_machines)]

    def dfs(scheduled: int, cmax: int) -> bool:
        if cmax >= best[0]:
            return False
        if scheduled == total:
            best[0] = cmax
            best[1] += 1
            best_seqs[0] = [list(s) for s in seqs]
            return cmax <= lb
        # earliest completion among schedulable ops
        ec_min, mstar = None, None
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
        for j in conflict:
            mc, p = routes[j][nxt[j]]
            start = max(job_ready[j], mach_ready[mc])
            saved = (job_ready[j], mach_ready[mc])
            job_ready[j] = mach_ready[mc] = start + p
            seqs[mc].append((j, nxt[j]))
            nxt[j] += 1
            done = dfs(scheduled + 1, max(cmax, start + p))
            nxt[j] -= 1
            seqs[mc].pop()
            job_ready[j], mach_ready[mc] = saved
            if done:
                return True
        return False

    dfs(0, 0)
    return OracleResult(best[0], best[1], Solution.from_lists(best_seqs[0]))


def reference_evaluate(inst: Instance, solution: Solution) -> int:
    """Makespan by repeated arc relaxation (Bellman-Ford style) from all-zero starts."""
    arcs = []
    for route_j, route in enumerate(inst.routes):
        for k in range(1, len(route)):
            arcs.append(((route_j, k - 1), (route_j, k)))
    for seq in solution.sequences:
        for a, b in zip(seq, seq[1:]):
            arcs.append((a, b))
    start = {op: 0 for op in inst.ops()}
    dur = {op: inst.duration(op) for op in inst.ops()}
    n = len(start)
    for _ in range(n + 1):
        changed = False
        for a, b in arcs:
            if start[a] + dur[a] > start[b]:
                start[b] = start[a] + dur[a]
                changed = True
        if not changed:
            return max(start[o] + dur[o] for o in start)
    raise CycleError(_find_cycle_node(arcs))


def _find_cycle_node(arcs) -> tuple[int, int]:
    succ: dict = {}
    for a, b in arcs:
        succ.setdefault(a, []).append(b)
    state: dict = {}  # 1 = on stack, 2 = finished
    for root in list(succ):
        if root in state:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                return nxt
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(succ.get(nxt, ()))))
    raise AssertionError("relaxation diverged without a cycle")
