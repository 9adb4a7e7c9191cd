import numpy as np
import pytest

from jsp_tabu import CycleError, Instance, Solution, evaluate
from jsp_tabu.oracle import reference_evaluate
from jsp_tabu.schedule import (
    all_critical_blocks,
    critical_blocks,
    critical_path,
    gantt_export,
    makespan,
)

from conftest import fig2_solution, fuzz_cases, op


def test_fig2_makespan_heads_tails(fig2):
    inst, sol, data = fig2
    assert data.makespan == 10
    assert data.q(inst, op("O33")) == 1
    assert data.q(inst, op("O13")) == 4
    assert data.q(inst, op("O23")) == 2
    assert data.q(inst, op("O32")) == 3
    assert data.r(inst, op("O12")) == 5
    assert data.r(inst, op("O22")) == 1


def test_swapped_m2_gives_12(example):
    seqs = [list(s) for s in fig2_solution().sequences]
    seqs[1] = [op("O12"), op("O31"), op("O23")]
    sol = Solution.from_lists(seqs)
    data = evaluate(example, sol)
    assert data.makespan == 12
    path = critical_path(example, sol, data)
    assert sum(example.duration(o) for o in path) == 12
    assert all(data.is_critical(example, o) for o in path)


def test_fig2_critical_path_and_blocks(fig2):
    inst, sol, data = fig2
    path = critical_path(inst, sol, data)
    assert path == [op("O31"), op("O12"), op("O13"), op("O33")]
    blocks = critical_blocks(path, sol)
    assert [(b.machine, b.ops) for b in blocks] == [
        (1, (op("O31"), op("O12"))),
        (2, (op("O13"), op("O33"))),
    ]
    assert blocks[0].is_first and not blocks[0].is_last
    assert blocks[1].is_last and not blocks[1].is_first


def test_single_job():
    inst = Instance("one", 1, 3, (((0, 2), (2, 4), (1, 3)),))
    sol = Solution.from_lists([[(0, 0)], [(0, 2)], [(0, 1)]])
    data = evaluate(inst, sol)
    assert data.makespan == 9
    path = critical_path(inst, sol, data)
    assert path == [(0, 0), (0, 1), (0, 2)]
    assert all(data.is_critical(inst, o) for o in inst.ops())
    assert all(len(b.ops) == 1 for b in critical_blocks(path, sol))


def test_one_machine_single_block():
    inst = Instance("m1", 3, 1, (((0, 2),), ((0, 3),), ((0, 1),)))
    sol = Solution.from_lists([[(1, 0), (0, 0), (2, 0)]])
    data = evaluate(inst, sol)
    blocks = critical_blocks(critical_path(inst, sol, data), sol)
    assert len(blocks) == 1 and blocks[0].ops == ((1, 0), (0, 0), (2, 0))
    assert blocks[0].is_first and blocks[0].is_last


def test_cycle_detected(example):
    # O12 before O31 on M2 and O32 before O11 on M1: O11->O12->O31->O32->O11
    seqs = [list(s) for s in fig2_solution().sequences]
    seqs[0] = [op("O21"), op("O32"), op("O11")]
    seqs[1] = [op("O12"), op("O31"), op("O23")]
    sol = Solution.from_lists(seqs)
    with pytest.raises(CycleError) as err:
        evaluate(example, sol)
    assert err.value.op in {op("O11"), op("O12"), op("O31"), op("O32")}
    with pytest.raises(CycleError):
        reference_evaluate(example, sol)


def test_invalid_selection_rejected(example):
    with pytest.raises(ValueError):
        evaluate(example, Solution.from_lists([[op("O11")], [], []]))


def test_gantt_export_fig2(fig2):
    inst, sol, data = fig2
    text = gantt_export(inst, sol, data)
    lines = text.splitlines()
    assert lines[0] == "machine,operation,start,end,critical"
    assert "M2,O31,0,5,critical" in lines
    assert len(lines) - 1 == inst.num_ops
    keys = [(int(l.split(",")[0][1:]), int(l.split(",")[2])) for l in lines[1:]]
    assert keys == sorted(keys)


def test_gantt_single_op():
    inst = Instance("one", 1, 1, (((0, 4),),))
    sol = Solution.from_lists([[(0, 0)]])
    assert gantt_export(inst, sol, evaluate(inst, sol)).splitlines()[1] == "M1,O11,0,4,critical"


def test_solution_array_roundtrip(fig2):
    inst, sol, _ = fig2
    assert Solution.from_array(inst, sol.to_array(inst)) == sol
    assert sol.position(op("O12"), inst) == 1


def test_fuzz_schedule_invariants():
    for inst, sol, data in fuzz_cases(300, seed=11):
        a = inst.arrays
        mk = data.makespan
        assert mk == reference_evaluate(inst, sol)
        assert mk == int(np.max(data.head + a.dur))
        assert np.all(data.head + data.tail <= mk)
        for o in range(inst.num_ops):
            preds = [p for p in (a.jprev[o], data.mprev[o]) if p >= 0]
            for p in preds:
                assert data.head[o] >= data.head[p] + a.dur[p]
            want = max([data.head[p] + a.dur[p] for p in preds], default=0)
            assert data.head[o] == want
            succs = [s for s in (a.jnext[o], data.mnext[o]) if s >= 0]
            assert data.tail[o] == a.dur[o] + max([data.tail[s] for s in succs], default=0)
        path = critical_path(inst, sol, data)
        assert sum(inst.duration(o) for o in path) == mk
        assert data.head[inst.index(path[0])] == 0
        blocks = critical_blocks(path, sol)
        assert [o for b in blocks for o in b.ops] == path
        for b1, b2 in zip(blocks, blocks[1:]):
            h1, h2 = inst.machine(b1.ops[-1]), inst.machine(b2.ops[0])
            assert h1 != h2 or sol.position(b2.ops[0], inst) != sol.position(b1.ops[-1], inst) + 1
        for b in blocks:
            pos = [sol.position(o, inst) for o in b.ops]
            assert pos == list(range(pos[0], pos[0] + len(pos)))
        assert makespan(inst, sol) == mk


def test_all_critical_blocks_cover_canonical_path():
    for inst, sol, data in fuzz_cases(100, seed=5, max_jobs=6, max_machines=4):
        every = all_critical_blocks(inst, sol, data)
        covered = {o for b in every for o in b.ops}
        assert set(critical_path(inst, sol, data)) <= covered
        for b in every:
            assert all(data.is_critical(inst, o) for o in b.ops)
