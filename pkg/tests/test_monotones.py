import numpy as np
import pytest

from preservability import channels, monotones, preorder
from preservability.channels import ChannelSpec
from preservability.errors import DegenerateFacetError, UnsupportedChannelError, ValidationError


def test_vertex_set_and_facets_d2():
    lam = [0.7, 0.2, 0.06, 0.04]
    vs = monotones.vertex_set(lam)
    assert vs.rank == 3 and vs.vertices.shape == (4, 4)
    fs = monotones.facet_system(vs)
    assert not fs.degenerate and len(fs.facets) == 4
    for k, f in enumerate(fs.facets):
        assert f.omitted == 3 - k
        on = np.delete(vs.truncated, f.omitted, axis=0)
        assert np.allclose(on @ f.normal, f.offset, atol=1e-12)
        assert f.margin(vs.truncated[f.omitted]) < 0
        assert f.margin(fs.interior_point) < 0


def test_vertices_pass_their_own_monotones():
    lam = channels.random_probs(9, np.random.default_rng(1))
    fs = monotones.facet_system(monotones.vertex_set(lam))
    for v in fs.vertex_set.vertices:
        ok, margins = monotones.check_monotones(fs, v)
        assert ok and margins.max() <= 1e-9


def test_degenerate_vertex_set():
    fs = monotones.facet_system(monotones.vertex_set([0.4, 0.3, 0.2, 0.1]))
    assert fs.degenerate and fs.rank == 2
    with pytest.raises(DegenerateFacetError, match="LP"):
        monotones.check_monotones(fs, [0.25] * 4)
    assert monotones.vertex_set([0.25] * 4).rank == 0


def test_dephasing_to_depolarizing_margins():
    lam = preorder.eigenvalue_vector(ChannelSpec.named("dephasing", 0.6)).values
    fs = monotones.facet_system(monotones.vertex_set(lam))
    ok, margins = monotones.check_monotones(fs, preorder.eigenvalue_vector(ChannelSpec.named("depolarizing", 0.3)))
    assert ok and margins.shape == (4,) and margins.max() <= 0


@pytest.mark.parametrize("d,n", [(2, 200), (3, 60)])
def test_monotones_agree_with_lp(d, n):
    rng = np.random.default_rng(10 + d)
    checked = 0
    for _ in range(n):
        lam = channels.random_probs(d * d, rng)
        mu = channels.random_probs(d * d, rng) @ preorder.permuted_vertices(lam, d) if rng.random() < 0.5 else channels.random_probs(d * d, rng)
        fs = monotones.facet_system(monotones.vertex_set(lam))
        ok, margins = monotones.check_monotones(fs, mu)
        if np.min(np.abs(margins)) < 1e-7:
            continue
        assert ok == preorder.decide(lam, mu, d).feasible
        checked += 1
    assert checked > 0.9 * n


# --- game -----------------------------------------------------------------------


def test_game_states_are_states():
    gs = monotones.game_states(channels.random_channel(2, "weyl_mixture", seed=3))
    for rho in gs.states:
        w = np.linalg.eigvalsh(rho)
        assert w.min() > -1e-12 and np.isclose(w.sum(), 1)
    assert np.all(gs.Q >= 0) and np.allclose(gs.Q.sum(axis=1), 1)


@pytest.mark.parametrize("kind", ["weyl_mixture", "qubit_unital"])
def test_per_facet_identity(kind):
    for seed in range(20):
        gs = monotones.game_states(channels.random_channel(2, kind, seed=seed))
        assert np.max(np.abs(gs.source_success - gs.expected_source_success())) <= 1e-9


def test_povm_completeness():
    src = channels.random_channel(2, "qubit_unital", seed=1)
    gs = monotones.game_states(src)
    for rho in gs.states:
        assert monotones.povm_defect(src, rho) < 1e-12


def test_game_detects_depolarizing_to_identity():
    gs = monotones.game_states(ChannelSpec.named("depolarizing", 0.5))
    cand, ok = monotones.play_game(gs, ChannelSpec.named("identity"))
    assert not ok
    assert np.any(cand > gs.source_success + 1e-9)


def test_game_main_pairing_known_counterexample():
    # source facet 11 is the only one tested by the main pairing at d=2
    src = ChannelSpec.from_weyl_probs([0.7, 0.1, 0.1, 0.1])
    tgt = ChannelSpec.from_weyl_probs([0.0, 1 / 3, 1 / 3, 1 / 3])
    assert not preorder.convertible(src, tgt).feasible
    _, main = monotones.play_game(monotones.game_states(src), tgt)
    _, _, alt = monotones.play_game_alternative(monotones.game_states(src), tgt)
    assert main and not alt


def test_alternative_pairing_agrees_with_lp():
    rng = np.random.default_rng(4)
    for _ in range(150):
        src = channels.random_channel(2, "weyl_mixture", rng)
        tgt = (
            channels.apply_superchannel(channels.random_superchannel(2, "weyl_mixture", rng), src)
            if rng.random() < 0.5
            else channels.random_channel(2, "weyl_mixture", rng)
        )
        gs = monotones.game_states(src)
        cand, ref, alt = monotones.play_game_alternative(gs, tgt)
        if np.min(np.abs(cand - ref)) < 1e-7:
            continue
        assert alt == preorder.convertible(src, tgt).feasible


def test_strategy_table_pattern():
    gs = monotones.game_states(ChannelSpec.named("depolarizing", 0.5))
    T = monotones.strategy_table(gs)
    assert np.allclose(T.sum(axis=0), 1)
    p = T.max()
    assert np.allclose(np.sort(T, axis=0)[1:], p) and np.allclose(T.min(axis=0), 1 - 3 * p)


def test_alternative_requires_weyl_frame():
    gs = monotones.game_states(channels.random_channel(2, "qubit_unital", seed=0))
    with pytest.raises(UnsupportedChannelError):
        monotones.strategy_table(gs)


def test_game_dimension_mismatch():
    gs = monotones.game_states(ChannelSpec.named("depolarizing", 0.5))
    with pytest.raises(ValidationError):
        monotones.play_game(gs, ChannelSpec.named("identity", d=3))


def test_game_rejects_degenerate_source():
    with pytest.raises(DegenerateFacetError):
        monotones.game_states(ChannelSpec.from_weyl_probs([0.4, 0.3, 0.2, 0.1]))
