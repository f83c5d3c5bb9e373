"""The quantized CIELAB state space and the directed acyclic color graph.

The state space is 512 gamut colors produced by Halton sampling (bases
2, 3, 5) over the Lab bounding box with rejection, relaxed by Lloyd-Max
iteration against a dense in-gamut sample cloud. Aligned corpus colormaps
snap onto the quantized states to form a DAG strictly decreasing in L,
bracketed by the distinguished white and black states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .colorspace import (
    LabColor,
    delta_e_2000,
    gamut_clip_array,
    in_gamut_array,
    lab_to_hex,
)
from .corpus import Corpus, ExpertColormap

__all__ = [
    "StateSpace",
    "ColorGraph",
    "Trajectory",
    "SeedUnsupportedError",
    "quantize_gamut",
    "get_state_space",
    "align_colormap",
    "build_graph",
    "graph_debug_doc",
    "topological_order",
]

N_STATES = 512
_LAB_LO = np.array([0.0, -128.0, -128.0])
_LAB_HI = np.array([100.0, 128.0, 128.0])


def _halton_block(start: int, count: int) -> np.ndarray:
    """Halton points (bases 2, 3, 5) for indices start..start+count-1, 1-based."""
    out = np.empty((count, 3))
    for dim, base in enumerate((2, 3, 5)):
        i = np.arange(start, start + count, dtype=np.int64)
        f = np.ones(count)
        r = np.zeros(count)
        i = i.copy()
        while np.any(i > 0):
            f = f / base
            r = r + f * (i % base)
            i = i // base
        out[:, dim] = r
    return out


@dataclass(frozen=True)
class StateSpace:
    """512 quantized gamut colors plus the distinguished white and black states."""

    labs: np.ndarray  # (514, 3): 512 quantized states, then white, then black
    rng_seed: int

    WHITE: int = field(default=N_STATES, init=False)
    BLACK: int = field(default=N_STATES + 1, init=False)

    def __post_init__(self):
        labs = np.asarray(self.labs, dtype=float)
        object.__setattr__(self, "labs", labs)
        object.__setattr__(self, "_tree", cKDTree(labs[:N_STATES]))

    @property
    def quantized(self) -> np.ndarray:
        return self.labs[:N_STATES]

    def nearest(self, lab) -> int:
        """Index of the quantized state nearest the given Lab color (Euclidean)."""
        lab = lab.to_array() if isinstance(lab, LabColor) else np.asarray(lab, float)
        _, idx = self._tree.query(lab)
        return int(idx)

    def nearest_many(self, labs) -> np.ndarray:
        _, idx = self._tree.query(np.asarray(labs, float))
        return idx.astype(int)

    def mean_nn_distance(self, metric: str = "de2000") -> float:
        """Mean distance from each quantized state to its nearest neighbor."""
        if metric == "euclidean":
            d, _ = self._tree.query(self.quantized, k=2)
            return float(d[:, 1].mean())
        q = self.quantized
        de = delta_e_2000(q[:, None, :], q[None, :, :])
        np.fill_diagonal(de, np.inf)
        return float(de.min(axis=1).mean())

    def to_doc(self) -> dict:
        return {
            "format": "state-space/1",
            "rng_seed": self.rng_seed,
            "states": [[float(v) for v in s] for s in self.quantized],
        }


def quantize_gamut(
    rng_seed: int,
    n_states: int = N_STATES,
    cloud_size: int = 1 << 17,
    max_iters: int = 100,
    move_tol: float = 0.5,
) -> StateSpace:
    """Quantize the sRGB gamut into ``n_states`` approximately equidistant colors.

    Halton samples over the Lab bounding box are rejected against the gamut
    until ``n_states`` are accepted, then Lloyd-Max relaxation (centroidal
    Voronoi iteration against an rng-seeded dense in-gamut cloud) runs until
    the largest centroid movement drops below ``move_tol`` or ``max_iters``
    iterations have passed.
    """
    # Phase 1: Halton rejection sampling.
    accepted = []
    total = 0
    idx = 1
    while total < n_states:
        block = _LAB_LO + _halton_block(idx, 4096) * (_LAB_HI - _LAB_LO)
        idx += 4096
        keep = block[in_gamut_array(block)]
        accepted.append(keep)
        total += len(keep)
    states = np.concatenate(accepted)[:n_states]

    # Phase 2: Lloyd-Max against a dense uniform in-gamut cloud.
    rng = np.random.default_rng(rng_seed)
    chunks = []
    total = 0
    while total < cloud_size:
        cand = rng.uniform(_LAB_LO, _LAB_HI, (cloud_size, 3))
        keep = cand[in_gamut_array(cand)]
        chunks.append(keep)
        total += len(keep)
    cloud = np.concatenate(chunks)[:cloud_size]

    for _ in range(max_iters):
        tree = cKDTree(states)
        _, assign = tree.query(cloud)
        counts = np.bincount(assign, minlength=n_states)
        new_states = states.copy()
        for d in range(3):
            sums = np.bincount(assign, weights=cloud[:, d], minlength=n_states)
            new_states[:, d] = np.where(counts > 0, sums / np.maximum(counts, 1), states[:, d])
        # The gamut is not convex, so a cell mean can fall just outside it.
        new_states = gamut_clip_array(new_states, chroma_tol=0.01)
        move = float(np.linalg.norm(new_states - states, axis=1).max())
        states = new_states
        if move < move_tol:
            break

    labs = np.vstack([states, [100.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    return StateSpace(labs=labs, rng_seed=rng_seed)


@lru_cache(maxsize=4)
def get_state_space(rng_seed: int) -> StateSpace:
    """Process-wide cache: quantization is expensive and deterministic per seed."""
    return quantize_gamut(rng_seed)


@dataclass(frozen=True)
class Trajectory:
    """An ordered white-to-black control point sequence through the graph."""

    labs: np.ndarray  # (n, 3), strictly decreasing in L
    id: str
    provenance: str = "corpus"  # "corpus" | "synthesized"
    state_ids: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "labs", np.asarray(self.labs, dtype=float))
        if self.state_ids is not None:
            object.__setattr__(self, "state_ids", tuple(int(i) for i in self.state_ids))

    def __len__(self) -> int:
        return len(self.labs)

    @property
    def interior(self) -> np.ndarray:
        """States between white and black."""
        return self.labs[1:-1]

    def states(self) -> list[LabColor]:
        return [LabColor.from_array(p) for p in self.labs]


@dataclass(frozen=True)
class ColorGraph:
    """Quantized state space plus the successor map distilled from the corpus."""

    space: StateSpace
    actions: dict  # state index -> np.ndarray of successor indices
    seed_state: int
    seed_lab: np.ndarray

    def successors(self, s: int) -> np.ndarray:
        return self.actions.get(s, np.empty(0, dtype=int))

    def edges(self):
        for s, succ in self.actions.items():
            for t in succ:
                yield (s, int(t))

    def n_edges(self) -> int:
        return sum(len(v) for v in self.actions.values())


class SeedUnsupportedError(ValueError):
    """No aligned colormap survives gamut filtering for the requested seed."""

    def __init__(self, seed: LabColor, suggestions: list[str]):
        self.seed = seed
        self.suggestions = suggestions
        super().__init__(
            f"seed color unsupported: no aligned colormap stays in gamut for "
            f"{lab_to_hex(seed)}; nearby workable seeds: {', '.join(suggestions) or 'none found'}"
        )


def _rotate_hue(points: np.ndarray, angle: float) -> np.ndarray:
    """Rotate a, b about the neutral axis by ``angle`` radians."""
    out = points.copy()
    c, s = math.cos(angle), math.sin(angle)
    a, b = points[:, 1], points[:, 2]
    out[:, 1] = c * a - s * b
    out[:, 2] = s * a + c * b
    return out


def _translate_lc(points: np.ndarray, dL: float, dC: float) -> np.ndarray:
    """Shift every point by dL in lightness and dC along its own chroma ray."""
    out = points.copy()
    out[:, 0] = points[:, 0] + dL
    chroma = np.hypot(points[:, 1], points[:, 2])
    new_chroma = np.maximum(chroma + dC, 0.0)
    scale = np.where(chroma > 1e-12, new_chroma / np.maximum(chroma, 1e-12), 0.0)
    out[:, 1] = points[:, 1] * scale
    out[:, 2] = points[:, 2] * scale
    return out


def align_colormap(cm: ExpertColormap, seed: LabColor) -> list[ExpertColormap]:
    """Fit a colormap to the seed color; returns the surviving variants (up to 2).

    The control point closest to the seed in L* anchors the alignment. The
    first variant rotates the whole ramp in the hue plane by the seed/anchor
    hue difference and then translates in the L*-C* plane so the anchor lands
    on the seed; the second only translates in L*-C*. Variants with any of
    their nine points out of gamut are discarded.
    """
    pts = cm.points
    anchor = int(np.argmin(np.abs(pts[:, 0] - seed.L)))
    p = pts[anchor]
    p_chroma = math.hypot(p[1], p[2])
    p_hue = math.atan2(p[2], p[1])
    seed_hue = math.atan2(seed.b, seed.a)

    variants = []

    rotated = _rotate_hue(pts, seed_hue - p_hue)
    v1 = _translate_lc(rotated, seed.L - p[0], seed.chroma() - p_chroma)
    variants.append((f"{cm.id}~hue", v1))

    v2 = _translate_lc(pts, seed.L - p[0], seed.chroma() - p_chroma)
    # Pure L-C translation keeps the anchor's hue; it matches the seed only
    # by lightness and chroma unless the hues already coincide.
    variants.append((f"{cm.id}~lc", v2))

    out = []
    seen = []
    for vid, v in variants:
        if not np.all(in_gamut_array(v)):
            continue
        if any(np.allclose(v, prev, atol=1e-9) for prev in seen):
            continue
        seen.append(v)
        out.append(ExpertColormap(id=vid, source=cm.source, points=v))
    return out


def _snap_trajectory(space: StateSpace, points: np.ndarray) -> tuple | None:
    """Snap 9 aligned colors to states; merge duplicates; keep a strict L descent.

    Snapping can reorder lightness locally. Edges that fail strict L decrease
    are dropped by skipping the offending state and bridging to the next one
    that continues the descent; the ramp is rejected when fewer than 2 states
    survive (the chain cannot be reconnected).
    """
    ids = space.nearest_many(points)
    L = space.labs[:, 0]
    kept = [int(ids[0])]
    for i in ids[1:]:
        i = int(i)
        if i == kept[-1]:
            continue  # consecutive duplicates merge
        if L[i] < L[kept[-1]]:
            kept.append(i)
    if len(kept) < 2:
        return None
    return tuple(kept)


def _suggest_seeds(corpus: Corpus, space: StateSpace, seed: LabColor, k: int = 5) -> list[str]:
    """Nearby corpus control colors that would survive alignment."""
    all_pts = np.concatenate([cm.points for cm in corpus])
    de = delta_e_2000(np.tile(seed.to_array(), (len(all_pts), 1)), all_pts)
    suggestions = []
    for i in np.argsort(de):
        cand = LabColor.from_array(all_pts[i])
        if any(align_colormap(cm, cand) for cm in corpus):
            hx = lab_to_hex(cand)
            if hx not in suggestions:
                suggestions.append(hx)
        if len(suggestions) >= k:
            break
    return suggestions


def build_graph(
    corpus: Corpus, seed: LabColor, space: StateSpace
) -> tuple[ColorGraph, list[Trajectory]]:
    """Align the corpus to the seed, snap onto the state space, assemble the DAG.

    Returns the graph and the snapped corpus trajectories (the ranking
    candidates), each running white -> snapped control points -> black.
    Raises SeedUnsupportedError when no alignment survives.
    """
    aligned = []
    for cm in corpus:
        aligned.extend(align_colormap(cm, seed))
    if not aligned:
        raise SeedUnsupportedError(seed, _suggest_seeds(corpus, space, seed))

    actions: dict[int, set] = {}
    trajectories = []
    seen_chains = set()
    for cm in aligned:
        chain = _snap_trajectory(space, cm.points)
        if chain is None:
            continue
        full = (space.WHITE, *chain, space.BLACK)
        if full in seen_chains:
            continue
        seen_chains.add(full)
        for s, t in zip(full[:-1], full[1:]):
            actions.setdefault(s, set()).add(t)
        trajectories.append(
            Trajectory(
                labs=space.labs[list(full)],
                id=cm.id,
                provenance="corpus",
                state_ids=full,
            )
        )

    if not trajectories:
        raise SeedUnsupportedError(seed, _suggest_seeds(corpus, space, seed))

    graph = ColorGraph(
        space=space,
        actions={s: np.array(sorted(t), dtype=int) for s, t in sorted(actions.items())},
        seed_state=space.nearest(seed),
        seed_lab=seed.to_array(),
    )
    return graph, trajectories


def topological_order(graph: ColorGraph) -> list[int]:
    """Kahn's algorithm; raises ValueError if the graph has a cycle."""
    indeg: dict[int, int] = {}
    nodes = set(graph.actions.keys())
    for s, succ in graph.actions.items():
        for t in succ:
            nodes.add(int(t))
            indeg[int(t)] = indeg.get(int(t), 0) + 1
    queue = sorted(n for n in nodes if indeg.get(n, 0) == 0)
    order = []
    while queue:
        n = queue.pop(0)
        order.append(n)
        for t in graph.successors(n):
            t = int(t)
            indeg[t] -= 1
            if indeg[t] == 0:
                queue.append(t)
    if len(order) != len(nodes):
        raise ValueError("graph contains a cycle")
    return order


def graph_debug_doc(graph: ColorGraph, trajectories: list[Trajectory]) -> dict:
    """Edge list plus diagnostics, for debugging and export."""
    L = graph.space.labs[:, 0]
    return {
        "format": "color-graph-debug/1",
        "n_states": int(len(graph.space.quantized)),
        "n_edges": graph.n_edges(),
        "n_trajectories": len(trajectories),
        "seed_state": int(graph.seed_state),
        "seed_hex": lab_to_hex(LabColor.from_array(graph.seed_lab)),
        "edges": [[int(s), int(t), float(L[s] - L[t])] for s, t in graph.edges()],
        "trajectory_ids": [t.id for t in trajectories],
    }
