"""Critical-block neighbourhoods N5, N6, N7 and N8, feasibility tests and clipping.

A move names two operations ``u`` before ``v`` on one machine:

* ``FORWARD``: ``u`` is re-inserted right after ``v``;
* ``BACKWARD``: ``v`` is re-inserted right before ``u``.

When ``u`` and ``v`` are adjacent both kinds give the same sequence, so such
swaps are always reported as ``FORWARD``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .instance_io import Instance, Op
from .schedule import (
    CriticalBlock,
    ScheduleData,
    Solution,
    all_critical_blocks,
    critical_blocks,
    critical_path,
)


class MoveKind(enum.IntEnum):
    FORWARD = K.FORWARD
    BACKWARD = K.BACKWARD


class NeighborhoodKind(enum.IntEnum):
    N5 = K.N5
    N6 = K.N6
    N7 = K.N7
    N8 = K.N8

    @classmethod
    def parse(cls, text: str) -> "NeighborhoodKind":
        try:
            return cls[text.upper()]
        except KeyError:
            raise ValueError(f"unknown neighbourhood {text!r}; expected n5, n6, n7 or n8") from None


@dataclass(frozen=True, order=True)
class Move:
    kind: MoveKind
    machine: int
    u: Op
    v: Op

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise ValueError("a move needs two distinct operations")

    def key(self) -> tuple[int, Op, Op]:
        return (int(self.kind), self.u, self.v)


def prop1_holds(u: Op, v: Op, inst: Instance, data: ScheduleData) -> bool:
    """Moving ``u`` right after ``v`` keeps the selection acyclic (sufficient test)."""
    a = inst.arrays
    return bool(K.prop1(inst.index(u), inst.index(v), a.dur, a.jnext, data.tail))


def prop2_holds(u: Op, v: Op, inst: Instance, data: ScheduleData) -> bool:
    """Moving ``v`` right before ``u`` keeps the selection acyclic (sufficient test)."""
    a = inst.arrays
    return bool(K.prop2(inst.index(u), inst.index(v), a.dur, a.jprev, data.head))


def _block_arrays(inst: Instance, blocks: Sequence[CriticalBlock]):
    n = inst.num_ops
    bops = np.empty(max(n, 1), np.int64)
    bstart = np.empty(len(blocks) + 1, np.int64)
    bfirst = np.zeros(max(len(blocks), 1), np.bool_)
    blast = np.zeros(max(len(blocks), 1), np.bool_)
    k = 0
    for b, blk in enumerate(blocks):
        bstart[b] = k
        bfirst[b] = blk.is_first
        blast[b] = blk.is_last
        for op in blk.ops:
            bops[k] = inst.index(op)
            k += 1
    bstart[len(blocks)] = k
    return bops, bstart, bfirst, blast


def _blocks_for(inst, solution, data, all_critical_paths):
    if all_critical_paths:
        return all_critical_blocks(inst, solution, data)
    return critical_blocks(critical_path(inst, solution, data), solution)


def _to_moves(inst, cnt, out_k, out_u, out_v) -> list[Move]:
    mach = inst.arrays.mach
    return [
        Move(MoveKind(int(out_k[i])), int(mach[out_u[i]]), inst.op_at(int(out_u[i])), inst.op_at(int(out_v[i])))
        for i in range(cnt)
    ]


def _kernel_moves(kind, inst, solution, data, blocks, outside_window, gate, do_clip):
    a = inst.arrays
    seq = solution.to_array(inst)
    n = inst.num_ops
    L = seq.shape[1]
    bops, bstart, bfirst, blast = _block_arrays(inst, blocks)
    cap = n * (L + 4) + 16
    out_k = np.empty(cap, np.int64)
    out_u = np.empty(cap, np.int64)
    out_v = np.empty(cap, np.int64)
    cnt = K.generate(
        int(kind), bops, bstart, len(blocks), seq, a.mcount, a.mach, data.mpos, a.dur, a.jprev,
        a.jnext, data.head, data.tail, outside_window or 0, gate, out_k, out_u, out_v,
        np.zeros(n, np.int64), 1, np.empty(cap, np.int64), L,
    )
    if do_clip:
        cnt = K.clip(cnt, out_k, out_u, out_v, bops, bstart, len(blocks), bfirst, blast,
                     np.full(n, -1, np.int64), np.empty(n, np.int64))
    return _to_moves(inst, cnt, out_k, out_u, out_v)


def generate(
    kind: NeighborhoodKind,
    inst: Instance,
    solution: Solution,
    data: ScheduleData,
    *,
    outside_window: int | None = None,
    all_critical_paths: bool = False,
    gate: bool = True,
) -> list[Move]:
    """Deduplicated move list, sorted by (machine, pos(u), pos(v), kind).

    Every move is kept only if the matching feasibility test holds (forward:
    :func:`prop1_holds`, backward: :func:`prop2_holds`, adjacent swaps: either).
    ``gate=False`` skips the tests; only useful for studying them.
    """
    blocks = _blocks_for(inst, solution, data, all_critical_paths)
    return _kernel_moves(NeighborhoodKind(kind), inst, solution, data, blocks, outside_window, gate, False)


def clip(moves: Sequence[Move], blocks: Sequence[CriticalBlock], solution: Solution) -> list[Move]:
    """Remove moves that cannot reduce the makespan.

    In a first block (starting at time 0) the first op is never swapped with an
    inner op in either direction; symmetrically in a last block the last op and
    an inner op.
    """
    where: dict[Op, tuple[int, int]] = {}
    for b, blk in enumerate(blocks):
        for i, op in enumerate(blk.ops):
            where[op] = (b, i)
    kept = []
    for mv in moves:
        bu = where.get(mv.u)
        bv = where.get(mv.v)
        if bu is not None and bv is not None and bu[0] == bv[0]:
            blk = blocks[bu[0]]
            s = len(blk.ops)
            iu, iv = bu[1], bv[1]
            if blk.is_first and iu == 0 and 0 < iv < s - 1:
                continue
            if blk.is_last and iv == s - 1 and 0 < iu < s - 1:
                continue
        kept.append(mv)
    return kept


def neighbors(
    kind: NeighborhoodKind,
    inst: Instance,
    solution: Solution,
    data: ScheduleData,
    *,
    outside_window: int | None = None,
    all_critical_paths: bool = False,
    clip_moves: bool | None = None,
) -> list[Move]:
    """The candidate list exactly as the search builds it (clipping on for N8)."""
    kind = NeighborhoodKind(kind)
    if clip_moves is None:
        clip_moves = kind == NeighborhoodKind.N8
    blocks = _blocks_for(inst, solution, data, all_critical_paths)
    return _kernel_moves(kind, inst, solution, data, blocks, outside_window, True, clip_moves)
