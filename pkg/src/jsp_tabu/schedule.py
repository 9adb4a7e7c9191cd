"""Complete selections, longest-path evaluation and critical blocks."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .instance_io import Instance, Op


class CycleError(ValueError):
    """The selection implies a cyclic precedence graph (infeasible)."""

    def __init__(self, op: Op):
        self.op = op
        super().__init__(f"selection is cyclic; operation {op} lies on a cycle")


@dataclass(frozen=True)
class Solution:
    """One processing order per machine: ``sequences[h]`` lists ops on machine h."""

    sequences: tuple[tuple[Op, ...], ...]

    @classmethod
    def from_lists(cls, sequences: Sequence[Sequence[Op]]) -> "Solution":
        return cls(tuple(tuple((int(j), int(k)) for j, k in seq) for seq in sequences))

    def validate(self, inst: Instance) -> None:
        if len(self.sequences) != inst.num_machines:
            raise ValueError(f"expected {inst.num_machines} machine sequences")
        expected: list[set[Op]] = [set() for _ in range(inst.num_machines)]
        for op in inst.ops():
            expected[inst.machine(op)].add(op)
        for h, seq in enumerate(self.sequences):
            if len(seq) != len(set(seq)) or set(seq) != expected[h]:
                raise ValueError(f"machine {h}: sequence is not a permutation of its operations")

    def position(self, op: Op, inst: Instance) -> int:
        return self.sequences[inst.machine(op)].index(op)

    def to_array(self, inst: Instance) -> np.ndarray:
        width = max(1, max(len(s) for s in self.sequences))
        seq = np.full((inst.num_machines, width), -1, np.int64)
        for h, ops in enumerate(self.sequences):
            for i, op in enumerate(ops):
                seq[h, i] = inst.index(op)
        return seq

    @classmethod
    def from_array(cls, inst: Instance, seq: np.ndarray) -> "Solution":
        mlen = inst.arrays.mcount
        return cls(
            tuple(
                tuple(inst.op_at(int(seq[h, i])) for i in range(mlen[h]))
                for h in range(inst.num_machines)
            )
        )


@dataclass(frozen=True)
class ScheduleData:
    """Heads, tails and makespan of an evaluated selection (flat op indexing)."""

    head: np.ndarray  # earliest start r_o
    tail: np.ndarray  # longest path from o to the end, including p_o
    makespan: int
    order: np.ndarray  # a topological order of the operations
    mpos: np.ndarray
    mprev: np.ndarray
    mnext: np.ndarray

    def r(self, inst: Instance, op: Op) -> int:
        return int(self.head[inst.index(op)])

    def q(self, inst: Instance, op: Op) -> int:
        return int(self.tail[inst.index(op)])

    def is_critical(self, inst: Instance, op: Op) -> bool:
        i = inst.index(op)
        return int(self.head[i] + self.tail[i]) == self.makespan


@dataclass(frozen=True)
class CriticalBlock:
    machine: int
    ops: tuple[Op, ...]
    # block opens at time 0 / closes at the makespan on its critical path
    is_first: bool = False
    is_last: bool = False


def _links(inst: Instance, seq: np.ndarray):
    n = inst.num_ops
    mpos = np.empty(n, np.int64)
    mprev = np.empty(n, np.int64)
    mnext = np.empty(n, np.int64)
    K.link(seq, inst.arrays.mcount, mpos, mprev, mnext)
    return mpos, mprev, mnext


def _cycle_member(inst: Instance, head_done: np.ndarray, mprev: np.ndarray) -> Op:
    # every unprocessed op keeps an unprocessed predecessor; walk back until repeat
    a = inst.arrays
    o = int(np.flatnonzero(~head_done)[0])
    visited: set[int] = set()
    while o not in visited:
        visited.add(o)
        for p in (a.jprev[o], mprev[o]):
            if p >= 0 and not head_done[p]:
                o = int(p)
                break
    return inst.op_at(o)


def evaluate(inst: Instance, solution: Solution) -> ScheduleData:
    """Longest-path evaluation; raises :class:`CycleError` for infeasible selections."""
    solution.validate(inst)
    a = inst.arrays
    seq = solution.to_array(inst)
    mpos, mprev, mnext = _links(inst, seq)
    n = inst.num_ops
    head = np.zeros(n, np.int64)
    tail = np.zeros(n, np.int64)
    order = np.full(n, -1, np.int64)
    indeg = np.empty(n, np.int64)
    mk = K.evaluate(a.dur, a.jprev, a.jnext, mprev, mnext, head, tail, order, indeg)
    if mk < 0:
        done = np.zeros(n, bool)
        done[order[order >= 0]] = True
        raise CycleError(_cycle_member(inst, done, mprev))
    for arr in (head, tail, order, mpos, mprev, mnext):
        arr.setflags(write=False)
    return ScheduleData(head, tail, int(mk), order, mpos, mprev, mnext)


def makespan(inst: Instance, solution: Solution) -> int:
    return evaluate(inst, solution).makespan


def critical_path(inst: Instance, solution: Solution, data: ScheduleData) -> list[Op]:
    a = inst.arrays
    path = np.empty(inst.num_ops, np.int64)
    k = K.critical_path(a.dur, a.jprev, data.mprev, data.head, data.makespan, path)
    return [inst.op_at(int(o)) for o in path[:k]]


def critical_blocks(path: Sequence[Op], solution: Solution) -> list[CriticalBlock]:
    """Partition a critical path into maximal runs of machine-adjacent operations."""
    where: dict[Op, tuple[int, int]] = {}
    for h, seq in enumerate(solution.sequences):
        for i, op in enumerate(seq):
            where[op] = (h, i)
    runs: list[list[Op]] = []
    for op in path:
        h, i = where[op]
        if runs:
            ph, pi = where[runs[-1][-1]]
            if ph == h and pi + 1 == i:
                runs[-1].append(op)
                continue
        runs.append([op])
    return [
        CriticalBlock(where[r[0]][0], tuple(r), is_first=b == 0, is_last=b == len(runs) - 1)
        for b, r in enumerate(runs)
    ]


def all_critical_blocks(inst: Instance, solution: Solution, data: ScheduleData) -> list[CriticalBlock]:
    """Blocks spanning every critical path (maximal tight runs of critical ops)."""
    a = inst.arrays
    seq = solution.to_array(inst)
    n = inst.num_ops
    bops = np.empty(n, np.int64)
    bstart = np.empty(n + 1, np.int64)
    bfirst = np.empty(n, np.bool_)
    blast = np.empty(n, np.bool_)
    nb = K.all_blocks(seq, a.mcount, a.dur, data.head, data.tail, data.makespan, bops, bstart,
                      bfirst, blast, np.empty(n, np.int64), np.empty(n, np.int64),
                      np.empty(n + 1, np.int64))
    out = []
    for b in range(nb):
        ops = tuple(inst.op_at(int(o)) for o in bops[bstart[b] : bstart[b + 1]])
        out.append(CriticalBlock(inst.machine(ops[0]), ops, bool(bfirst[b]), bool(blast[b])))
    return out


def _op_label(inst: Instance, op: Op) -> str:
    if inst.num_jobs < 10 and max(len(r) for r in inst.routes) < 10:
        return f"O{op[0] + 1}{op[1] + 1}"
    return f"O{op[0] + 1}_{op[1] + 1}"


def gantt_export(inst: Instance, solution: Solution, data: ScheduleData) -> str:
    """CSV rows ``machine,operation,start,end,critical`` sorted by machine, start.

    Labels are 1-indexed (``M2``, ``O31``) to match the usual textbook notation.
    """
    rows = []
    for op in inst.ops():
        i = inst.index(op)
        start = int(data.head[i])
        crit = int(data.head[i] + data.tail[i]) == data.makespan
        rows.append((inst.machine(op), start, _op_label(inst, op), start + inst.duration(op), crit))
    rows.sort(key=lambda r: (r[0], r[1]))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["machine", "operation", "start", "end", "critical"])
    for h, start, label, end, crit in rows:
        writer.writerow([f"M{h + 1}", label, start, end, "critical" if crit else ""])
    return buf.getvalue()


def random_selection(inst: Instance, rng: np.random.Generator) -> Solution:
    """Uniformly random dispatch order; any feasible selection can come out of it."""
    nxt = [0] * inst.num_jobs
    seqs: list[list[Op]] = [[] for _ in range(inst.num_machines)]
    open_jobs = [j for j in range(inst.num_jobs)]
    while open_jobs:
        idx = int(rng.integers(len(open_jobs)))
        j = open_jobs[idx]
        op = (j, nxt[j])
        seqs[inst.machine(op)].append(op)
        nxt[j] += 1
        if nxt[j] == len(inst.routes[j]):
            open_jobs.pop(idx)
    return Solution.from_lists(seqs)
