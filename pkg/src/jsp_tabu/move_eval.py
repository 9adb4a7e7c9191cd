"""Applying moves and estimating the makespan they lead to."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .instance_io import Instance
from .neighborhood import Move, MoveKind
from .schedule import ScheduleData, Solution


@dataclass(frozen=True)
class MoveEstimate:
    estimated_makespan: int
    # span values had to be recomputed exactly (job neighbours were affected)
    exact_span: bool = False


def apply(move: Move, solution: Solution) -> Solution:
    seq = solution.sequences[move.machine]
    try:
        pu = seq.index(move.u)
        pv = seq.index(move.v)
    except ValueError:
        raise ValueError(f"{move}: endpoint not on machine {move.machine}") from None
    if pu >= pv:
        raise ValueError(f"{move}: u must precede v on the machine")
    inner = seq[pu + 1 : pv]
    if move.kind == MoveKind.FORWARD:
        span = inner + (move.v, move.u)
    else:
        span = (move.v, move.u) + inner
    new_seq = seq[:pu] + span + seq[pv + 1 :]
    return Solution(solution.sequences[: move.machine] + (new_seq,) + solution.sequences[move.machine + 1 :])


def _scratch(inst: Instance, solution: Solution):
    n = inst.num_ops
    seq = solution.to_array(inst)
    L = seq.shape[1]
    mpos = np.empty(n, np.int64)
    mprev = np.empty(n, np.int64)
    mnext = np.empty(n, np.int64)
    K.link(seq, inst.arrays.mcount, mpos, mprev, mnext)
    return seq, mpos, mprev, mnext, L


def _estimate(move: Move, inst: Instance, data: ScheduleData, solution: Solution, fast_only: bool):
    a = inst.arrays
    n = inst.num_ops
    seq, mpos, mprev, mnext, L = _scratch(inst, solution)
    u, v = inst.index(move.u), inst.index(move.v)
    if mpos[u] >= mpos[v] or a.mach[u] != move.machine or a.mach[v] != move.machine:
        raise ValueError(f"{move}: u must precede v on machine {move.machine}")
    return K.estimate(
        int(move.kind), u, v, seq, a.mcount, a.mach, mpos, mprev, mnext, a.dur, a.jprev, a.jnext,
        data.head, data.tail, np.empty(L, np.int64), np.empty(L, np.int64), np.empty(L, np.int64),
        np.empty(L, np.int64), np.empty(n, np.int64), np.empty(n, np.int64), np.empty(n, np.int64),
        np.empty(n, np.int64), fast_only,
    )


def estimate(move: Move, inst: Instance, data: ScheduleData, solution: Solution) -> MoveEstimate:
    """Lower bound on the post-move makespan: the longest path through the moved span.

    Sandwich: ``estimate <= exact <= max(estimate, old makespan)``, with
    equality on the left whenever a new critical path touches the span.
    """
    value, exact_span = _estimate(move, inst, data, solution, False)
    return MoveEstimate(int(value), bool(exact_span))


def recurrence_estimate(move: Move, inst: Instance, data: ScheduleData, solution: Solution) -> int:
    """Head/tail recurrences on the reordered span using pre-move job neighbours only.

    Cheap, but can overshoot when a job neighbour of the span is itself moved
    earlier by the insertion; :func:`estimate` guards against that.
    """
    value, _ = _estimate(move, inst, data, solution, True)
    return int(value)
