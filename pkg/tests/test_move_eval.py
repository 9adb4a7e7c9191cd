import pytest

from jsp_tabu import Instance, Move, MoveKind, NeighborhoodKind, Solution, evaluate
from jsp_tabu.move_eval import apply, estimate, recurrence_estimate
from jsp_tabu.neighborhood import generate

from conftest import fuzz_cases, op

F, B = MoveKind.FORWARD, MoveKind.BACKWARD


def test_apply_forward_fig2(fig2):
    _, sol, _ = fig2
    new = apply(Move(F, 2, op("O13"), op("O33")), sol)
    assert new.sequences[2] == (op("O22"), op("O33"), op("O13"))
    assert new.sequences[:2] == sol.sequences[:2]


def test_apply_backward_fig2(fig2):
    _, sol, _ = fig2
    new = apply(Move(B, 1, op("O31"), op("O12")), sol)
    assert new.sequences[1] == (op("O12"), op("O31"), op("O23"))


def test_apply_long_spans():
    sol = Solution.from_lists([[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]])
    fw = apply(Move(F, 0, (1, 0), (3, 0)), sol)
    assert fw.sequences[0] == ((0, 0), (2, 0), (3, 0), (1, 0), (4, 0))
    bw = apply(Move(B, 0, (1, 0), (3, 0)), sol)
    assert bw.sequences[0] == ((0, 0), (3, 0), (1, 0), (2, 0), (4, 0))
    # adjacent endpoints: both kinds are a plain swap
    assert apply(Move(F, 0, (1, 0), (2, 0)), sol) == apply(Move(B, 0, (1, 0), (2, 0)), sol)
    assert sol.sequences[0] == ((0, 0), (1, 0), (2, 0), (3, 0), (4, 0))


def test_apply_errors(fig2):
    _, sol, _ = fig2
    with pytest.raises(ValueError):
        apply(Move(F, 1, op("O12"), op("O31")), sol)
    with pytest.raises(ValueError):
        apply(Move(F, 0, op("O12"), op("O31")), sol)


def test_estimate_fig2_backward(fig2):
    inst, sol, data = fig2
    mv = Move(B, 1, op("O31"), op("O12"))
    assert estimate(mv, inst, data, sol).estimated_makespan == 12
    assert recurrence_estimate(mv, inst, data, sol) == 12
    assert evaluate(inst, apply(mv, sol)).makespan == 12


def test_estimate_fig2_forward(fig2):
    inst, sol, data = fig2
    mv = Move(F, 2, op("O13"), op("O33"))
    assert estimate(mv, inst, data, sol).estimated_makespan == 11
    assert recurrence_estimate(mv, inst, data, sol) == 11
    assert evaluate(inst, apply(mv, sol)).makespan == 11


def test_estimate_rejects_bad_move(fig2):
    inst, sol, data = fig2
    with pytest.raises(ValueError):
        estimate(Move(F, 1, op("O12"), op("O31")), inst, data, sol)


def test_plain_recurrences_can_overshoot():
    # w1 -> x and y -> w2 are job arcs, x before y on machine 1.  Moving u to
    # the end lets w1 and x start earlier, which the recurrences miss
    inst = Instance("cx", 4, 2, (((0, 10),), ((0, 1), (1, 1)), ((1, 1), (0, 1)), ((0, 1),)))
    sol = Solution.from_lists([[(0, 0), (1, 0), (2, 1), (3, 0)], [(1, 1), (2, 0)]])
    data = evaluate(inst, sol)
    mv = Move(F, 0, (0, 0), (3, 0))
    exact = evaluate(inst, apply(mv, sol)).makespan
    assert exact == 15
    assert recurrence_estimate(mv, inst, data, sol) == 25
    est = estimate(mv, inst, data, sol)
    assert est.estimated_makespan == 15 and est.exact_span


def test_sandwich_and_exactness_fuzz():
    slack_seen = False
    for inst, sol, data in fuzz_cases(300, seed=21, max_jobs=8, max_machines=8):
        for kind in (NeighborhoodKind.N5, NeighborhoodKind.N8):
            for mv in generate(kind, inst, sol, data):
                est = estimate(mv, inst, data, sol).estimated_makespan
                new_sol = apply(mv, sol)
                after = evaluate(inst, new_sol)
                assert est <= after.makespan <= max(est, data.makespan)
                span_ops = sol.sequences[mv.machine]
                span = span_ops[span_ops.index(mv.u) : span_ops.index(mv.v) + 1]
                # exact whenever some longest path runs through the moved span
                if any(int(after.head[inst.index(o)] + after.tail[inst.index(o)]) == after.makespan for o in span):
                    assert est == after.makespan
                if est < data.makespan and after.makespan == data.makespan:
                    slack_seen = True
    assert slack_seen


def test_estimate_on_off_path_machine():
    # a move on a machine with lots of slack: estimate below the old makespan,
    # exact value unchanged
    inst = Instance("slack", 3, 2, (((0, 20), (1, 1)), ((1, 1),), ((1, 1),)))
    sol = Solution.from_lists([[(0, 0)], [(1, 0), (2, 0), (0, 1)]])
    data = evaluate(inst, sol)
    mv = Move(F, 1, (1, 0), (2, 0))
    est = estimate(mv, inst, data, sol).estimated_makespan
    assert est < data.makespan == evaluate(inst, apply(mv, sol)).makespan == 21
