import numpy as np
import pytest

from cmapsmith import environment as env
from cmapsmith.colorspace import LabColor, hex_to_lab, in_gamut_array
from cmapsmith.corpus import Corpus, load_starter_corpus


@pytest.fixture(scope="module")
def space():
    return env.get_state_space(0)


@pytest.fixture(scope="module")
def corpus():
    return load_starter_corpus()


class TestQuantizeGamut:
    def test_size_and_gamut(self, space):
        assert space.quantized.shape == (512, 3)
        assert np.all(in_gamut_array(space.quantized, tol=1e-4))

    def test_mean_nn_band(self, space):
        assert 3.0 <= space.mean_nn_distance("de2000") <= 7.0

    def test_deterministic_given_seed(self):
        a = env.quantize_gamut(3, cloud_size=1 << 13, max_iters=8)
        b = env.quantize_gamut(3, cloud_size=1 << 13, max_iters=8)
        assert np.array_equal(a.labs, b.labs)

    def test_distinct_seeds_differ(self):
        a = env.quantize_gamut(3, cloud_size=1 << 13, max_iters=8)
        b = env.quantize_gamut(4, cloud_size=1 << 13, max_iters=8)
        assert not np.array_equal(a.labs, b.labs)

    def test_white_black_distinguished(self, space):
        assert np.allclose(space.labs[space.WHITE], [100, 0, 0])
        assert np.allclose(space.labs[space.BLACK], [0, 0, 0])


class TestAlignColormap:
    def test_seed_equal_to_control_point_is_identity(self, corpus):
        cm = corpus.colormaps[0]
        seed = LabColor.from_array(cm.points[4])
        variants = env.align_colormap(cm, seed)
        assert variants, "alignment at an existing control point must survive"
        assert np.allclose(variants[0].points, cm.points, atol=1e-9)

    def test_aligned_variant_contains_seed(self, corpus):
        seed = hex_to_lab("#186E8D")
        for cm in corpus:
            for v in env.align_colormap(cm, seed):
                if v.id.endswith("~hue"):
                    # Rotation variant passes through the seed exactly.
                    d = np.linalg.norm(v.points - seed.to_array(), axis=1)
                    assert d.min() < 1e-6
                else:
                    # L-C translation variant matches seed lightness and chroma
                    # at its anchor but keeps its own hue structure.
                    lc = np.stack(
                        [v.points[:, 0], np.hypot(v.points[:, 1], v.points[:, 2])], -1
                    )
                    target = np.array([seed.L, seed.chroma()])
                    assert np.linalg.norm(lc - target, axis=1).min() < 1e-6

    def test_high_chroma_seed_discards_more(self, corpus):
        hi = LabColor(50, 70, -60)
        lo = LabColor(50, 10, -10)
        n_hi = sum(len(env.align_colormap(cm, hi)) for cm in corpus)
        n_lo = sum(len(env.align_colormap(cm, lo)) for cm in corpus)
        assert n_hi < n_lo

    def test_variants_all_in_gamut(self, corpus):
        seed = hex_to_lab("#4E79A7")
        for cm in corpus:
            for v in env.align_colormap(cm, seed):
                assert np.all(in_gamut_array(v.points))


class TestBuildGraph:
    def test_trajectories_white_to_black_decreasing(self, corpus, space):
        graph, cands = env.build_graph(corpus, hex_to_lab("#186E8D"), space)
        assert len(cands) >= 2
        for t in cands:
            assert t.state_ids[0] == space.WHITE
            assert t.state_ids[-1] == space.BLACK
            assert np.all(np.diff(t.labs[:, 0]) < 0)

    def test_single_colormap_gives_single_chain(self, corpus, space):
        cm = corpus.colormaps[0]
        seed = LabColor.from_array(cm.points[4])
        single = Corpus(name="one", colormaps=(cm,))
        graph, cands = env.build_graph(single, seed, space)
        # Every graph state has out-degree 1 except black: one chain end to end.
        chain_ids = {t.state_ids for t in cands}
        assert len(chain_ids) >= 1
        for s, succ in graph.actions.items():
            if len(cands) == 1:
                assert len(succ) == 1

    def test_acyclic_by_topological_sort(self, corpus, space):
        graph, _ = env.build_graph(corpus, hex_to_lab("#B07AA1"), space)
        order = env.topological_order(graph)
        pos = {s: i for i, s in enumerate(order)}
        for s, t in graph.edges():
            assert pos[s] < pos[t]

    def test_all_edges_decrease_lightness(self, corpus, space):
        graph, _ = env.build_graph(corpus, hex_to_lab("#59A14F"), space)
        L = space.labs[:, 0]
        for s, t in graph.edges():
            assert L[t] < L[s]

    def test_white_only_outgoing_black_only_incoming(self, corpus, space):
        graph, _ = env.build_graph(corpus, hex_to_lab("#186E8D"), space)
        assert space.WHITE in graph.actions
        assert space.BLACK not in graph.actions
        incoming_white = [s for s, t in graph.edges() if t == space.WHITE]
        assert not incoming_white

    def test_candidates_reachable_in_graph(self, corpus, space):
        graph, cands = env.build_graph(corpus, hex_to_lab("#186E8D"), space)
        for t in cands:
            for s, nxt in zip(t.state_ids[:-1], t.state_ids[1:]):
                assert nxt in set(int(x) for x in graph.successors(s))

    def test_unsupported_seed_raises_with_suggestions(self, corpus, space):
        # Extreme chroma: far outside anything the corpus can align to.
        seed = LabColor(97.0, -120.0, 120.0)
        with pytest.raises(env.SeedUnsupportedError) as ei:
            env.build_graph(corpus, seed, space)
        assert ei.value.suggestions
        for s in ei.value.suggestions:
            assert s.startswith("#")

    def test_debug_doc(self, corpus, space):
        graph, cands = env.build_graph(corpus, hex_to_lab("#186E8D"), space)
        doc = env.graph_debug_doc(graph, cands)
        assert doc["n_edges"] == graph.n_edges()
        assert len(doc["edges"]) == doc["n_edges"]
        assert all(gap > 0 for _, _, gap in doc["edges"])
