import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evcp.annealer import AnnealConfig
from evcp.genetic import GaConfig
from evcp.hybrid import InvalidMethod, derive_seed, result_to_dict, solve
from evcp.instance import InstanceSpec, generate_instance
from evcp.qubo import LambdaParams

FAST_ANNEAL = AnnealConfig(num_reads=10, sweeps_per_read=100)
FAST_GA = GaConfig(population_size=20, generations=40)


@pytest.fixture(scope="module")
def inst():
    return generate_instance(InstanceSpec(8, 6, 4, 2, 2, rng_seed=3))


def _solve(inst, method, **kw):
    kw.setdefault("anneal_cfg", FAST_ANNEAL)
    kw.setdefault("ga_cfg", FAST_GA)
    kw.setdefault("runs", 3)
    return solve(inst, method, LambdaParams(1, 0.5, 0.1, 20), **kw)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_hybrid_never_worse_than_its_seed(seed):
    inst = generate_instance(InstanceSpec(7, 5, 4, 1, 2, rng_seed=seed))
    res = _solve(inst, "hybrid", seed=seed, seeded_generations=10)
    for hy, qa in zip(res.report.per_run, res.annealer_scores):
        assert hy <= qa


def test_ga_only_shape(inst):
    res = _solve(inst, "ga", ga_cfg=GaConfig(population_size=10, generations=1000), runs=1)
    assert res.wall_times["annealer"] == 0.0
    assert len(res.ga_history.best_fitness_per_generation) == 1001
    assert res.placement.provenance == "ga"
    assert res.annealer_scores == []


def test_hybrid_history_length(inst):
    res = _solve(inst, "hybrid")
    assert len(res.ga_history.best_fitness_per_generation) == 101
    assert len(res.histories) == 3
    assert res.placement.provenance == "hybrid"


def test_qa_runs(inst):
    res = _solve(inst, "qa", runs=1)
    assert len(res.report.per_run) == 1
    assert res.ga_history is None
    assert res.placement.provenance == "annealer"


def test_same_seed_same_result(inst):
    a = result_to_dict(_solve(inst, "hybrid", seed=4), LambdaParams())
    b = result_to_dict(_solve(inst, "hybrid", seed=4), LambdaParams())
    assert a == b
    c = result_to_dict(_solve(inst, "hybrid", seed=5), LambdaParams())
    assert c["per_run"] != a["per_run"] or c["placement"] != a["placement"]


def test_reuse_matches_fresh_annealing(inst):
    qa = _solve(inst, "qa", seed=2)
    fresh = _solve(inst, "hybrid", seed=2)
    reused = _solve(inst, "hybrid", seed=2, reuse=qa)
    assert fresh.report == reused.report
    assert fresh.annealer_scores == list(qa.report.per_run)


def test_reuse_must_be_qa(inst):
    ga = _solve(inst, "ga", runs=1)
    with pytest.raises(ValueError):
        _solve(inst, "hybrid", runs=1, reuse=ga)


def test_invalid_method(inst):
    with pytest.raises(InvalidMethod):
        solve(inst, "sa")
    with pytest.raises(ValueError):
        _solve(inst, "qa", runs=0)


def test_stage_seeds_differ():
    seeds = {derive_seed(0, r, s) for r in range(3) for s in ("anneal", "ga", "hybrid")}
    assert len(seeds) == 9
    assert derive_seed(7, 1, "ga") == derive_seed(7, 1, "ga")


def test_times_only_on_request(inst):
    res = _solve(inst, "qa", runs=1)
    assert "wall_times" not in result_to_dict(res, LambdaParams())
    assert set(result_to_dict(res, LambdaParams(), with_times=True)["wall_times"]) == {"annealer", "ga"}
