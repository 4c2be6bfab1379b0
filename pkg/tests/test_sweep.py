from __future__ import annotations

from fractions import Fraction

import pytest

from relcausal.scenarios import LAMBDA, canonical_embeddings
from relcausal.spacetime import MinkowskiPoint, SpaceError
from relcausal.sweep import SweepConfig, SweepError, latent_distributions, nsc_allowed_edges, sweep

NODES = (LAMBDA, "A", "C", "X", "Z")


def test_allowed_edges_task1():
    e = canonical_embeddings()["task1"]
    assert nsc_allowed_edges(NODES, e) == {(LAMBDA, "X"), (LAMBDA, "Z"), ("A", "X"), ("C", "Z")}


def test_allowed_edges_task2():
    e = canonical_embeddings()["task2"]
    assert nsc_allowed_edges(NODES, e) == {(LAMBDA, "X"), (LAMBDA, "Z")}


def test_no_edges_into_free_settings():
    e = canonical_embeddings()["task1"].moved(Lambda=MinkowskiPoint(1, 0))
    allowed = nsc_allowed_edges(NODES, e)
    assert ("A", LAMBDA) in allowed
    assert not any(m in ("A", "C") for _, m in allowed)


def test_unlocated_node():
    e = canonical_embeddings(latents=())["task1"]
    with pytest.raises(SpaceError):
        nsc_allowed_edges(NODES, e)


def test_latent_grid():
    assert latent_distributions(2) == [{0: Fraction(1, 2), 1: Fraction(1, 2)}]
    grid = latent_distributions(2, ("grid", 2))
    assert {tuple(d.values()) for d in grid} == {
        (0, 1), (1, 0), (Fraction(1, 2), Fraction(1, 2)),
    }
    assert all(sum(d.values()) == 1 for d in latent_distributions(3, ("grid", 4)))
    with pytest.raises(SweepError):
        latent_distributions(2, ("lattice", 2))


def test_task1_k2_exhaustive():
    r = sweep(SweepConfig(task=1, latent_k=2))
    assert r.models_checked == 256
    assert r.max_chsh == 2
    assert r.counterexamples == [] and r.passed
    assert r.witnesses_verified == 256
    assert all(r.graph_trace.values())


def test_task1_grid_distributions():
    r = sweep(SweepConfig(task=1, latent_k=2, latent_dists=("grid", 3), proof_trace=False))
    assert r.passed and r.max_chsh <= 2
    assert r.models_checked == 256 * len(latent_distributions(2, ("grid", 3)))


def test_task2_k4_exhaustive():
    r = sweep(SweepConfig(task=2, latent_k=4))
    assert r.models_checked == 256
    assert r.max_column_distance == 0 and r.passed


def test_sampled_is_reproducible():
    cfg = SweepConfig(task=1, latent_k=4, mode="sampled", budget=150, seed=1)
    a, b = sweep(cfg), sweep(cfg)
    assert a.passed and a.max_chsh <= 2
    assert (a.models_checked, a.max_chsh, a.distinct_behaviors) == (b.models_checked, b.max_chsh, b.distinct_behaviors)


def test_cap_enforced():
    with pytest.raises(SweepError):
        sweep(SweepConfig(task=1, latent_k=4, model_cap=1000))


def test_config_validation():
    with pytest.raises(SweepError):
        SweepConfig(task=3)
    with pytest.raises(SweepError):
        SweepConfig(mode="sampled", budget=0)
    with pytest.raises(SweepError):
        SweepConfig(latent_k=0)
