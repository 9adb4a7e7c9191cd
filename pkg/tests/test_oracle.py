import itertools

import numpy as np
import pytest

from jsp_tabu import CycleError, Instance, Solution, evaluate
from jsp_tabu.instance_io import builtin_example, random_instance, simple_lower_bound
from jsp_tabu.oracle import TooLarge, brute_force_optimum, reference_evaluate
from jsp_tabu.schedule import random_selection

from conftest import fig2_solution, fuzz_cases, op


def test_builtin_optimum_is_10():
    res = brute_force_optimum(builtin_example())
    assert res.makespan == 10
    assert evaluate(builtin_example(), res.solution).makespan == 10


def test_trivial_optima():
    assert brute_force_optimum(Instance("j", 1, 2, (((0, 3), (1, 4)),))).makespan == 7
    assert brute_force_optimum(Instance("m", 2, 1, (((0, 3),), ((0, 4),)))).makespan == 7


def test_too_large():
    with pytest.raises(TooLarge):
        brute_force_optimum(random_instance(4, 4, np.random.default_rng(0)))


def test_reference_evaluate_examples(example):
    assert reference_evaluate(example, fig2_solution()) == 10
    seqs = [list(s) for s in fig2_solution().sequences]
    seqs[1] = [op("O12"), op("O31"), op("O23")]
    assert reference_evaluate(example, Solution.from_lists(seqs)) == 12
    seqs[0] = [op("O21"), op("O32"), op("O11")]
    with pytest.raises(CycleError):
        reference_evaluate(example, Solution.from_lists(seqs))


def test_reference_matches_evaluate_fuzz():
    for inst, sol, data in fuzz_cases(300, seed=31):
        assert reference_evaluate(inst, sol) == data.makespan


def test_optimum_below_every_selection():
    # exhaustive check on tiny instances: enumerate every complete selection
    rng = np.random.default_rng(41)
    for _ in range(25):
        inst = random_instance(int(rng.integers(2, 4)), int(rng.integers(2, 4)), rng, max_duration=9)
        if inst.num_ops > 9:
            continue
        opt = brute_force_optimum(inst).makespan
        assert opt >= simple_lower_bound(inst)
        per_machine = [[o for o in inst.ops() if inst.machine(o) == h] for h in range(inst.num_machines)]
        best = None
        for combo in itertools.product(*(itertools.permutations(ops) for ops in per_machine)):
            try:
                mk = evaluate(inst, Solution.from_lists(combo)).makespan
            except CycleError:
                continue
            best = mk if best is None else min(best, mk)
        assert best == opt


def test_random_selections_never_beat_oracle():
    rng = np.random.default_rng(43)
    for _ in range(40):
        inst = random_instance(3, 4, rng)
        opt = brute_force_optimum(inst).makespan
        for _ in range(20):
            assert evaluate(inst, random_selection(inst, rng)).makespan >= opt
