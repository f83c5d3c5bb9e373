"""Optimistic Q-learning search for a novel high-utility trajectory.

Episodes walk the color graph from white to black under an epsilon-greedy
policy with a noisy transition model. All learned reward lands on the final
transition into black; interior steps only pay the moving penalty. The best
completed trajectory that is novel, passes through the seed state with at
least one other interior state, and interpolates fully inside the gamut is
kept as the search result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import colormap as cmod
from .environment import ColorGraph, Trajectory
from .reward import RewardContext

__all__ = [
    "QLearningConfig",
    "QTable",
    "SearchResult",
    "q_update",
    "run_episode",
    "search",
    "verify_result",
    "benchmark_variants",
    "BENCHMARK_VARIANTS",
]

ABORT_REWARD = -100.0  # dead-end episodes record this and are never candidates


@dataclass(frozen=True)
class QLearningConfig:
    q0: float = 100.0
    epsilon: float = 0.1
    alpha: float = 0.1
    gamma: float = 1.0
    episodes: int = 10000
    success_prob: float = 0.95

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.gamma != 1.0:
            raise ValueError("gamma is fixed at 1.0 (shared absorbing state)")


class QTable:
    """Action values stored per state, aligned with the successor arrays.

    Keys never exceed the graph's edge set; pruning dead ends only shrinks it.
    """

    def __init__(self, graph: ColorGraph, q0: float):
        self.succ = {s: succ.copy() for s, succ in graph.actions.items()}
        self.values = {s: np.full(len(succ), q0, dtype=float) for s, succ in self.succ.items()}

    def max_q(self, s: int) -> float:
        v = self.values.get(s)
        if v is None or len(v) == 0:
            return 0.0  # absorbing (black) or dead state
        return float(v.max())

    def get(self, s: int, a: int) -> float:
        idx = int(np.nonzero(self.succ[s] == a)[0][0])
        return float(self.values[s][idx])

    def prune(self, s: int, a: int) -> None:
        keep = self.succ[s] != a
        self.succ[s] = self.succ[s][keep]
        self.values[s] = self.values[s][keep]

    def items(self):
        for s, succ in self.succ.items():
            for idx, a in enumerate(succ):
                yield (s, int(a)), float(self.values[s][idx])


def q_update(q: QTable, s: int, a: int, r: float, s_next: int, alpha: float, gamma: float) -> None:
    """Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a'))."""
    idx = int(np.nonzero(q.succ[s] == a)[0][0])
    q.values[s][idx] = (1.0 - alpha) * q.values[s][idx] + alpha * (r + gamma * q.max_q(s_next))


def _episode_utility(graph: ColorGraph, ctx: RewardContext, chain: tuple, theta) -> float:
    if len(chain) < 4:
        # A single interior state has no slope; such walks can never qualify
        # (the acceptance needs two interior states), so they earn no utility.
        return 0.0
    traj = Trajectory(
        labs=graph.space.labs[list(chain)],
        id="episode",
        provenance="synthesized",
        state_ids=chain,
    )
    return float(np.asarray(theta, float) @ ctx.features(traj))


def run_episode(
    graph: ColorGraph,
    theta: np.ndarray,
    config: QLearningConfig,
    q: QTable,
    rng: np.random.Generator,
    ctx: RewardContext,
):
    """One white-to-black episode; returns (state chain or None, episode reward).

    A dead-end state aborts the episode with a large negative reward and the
    edge into it is pruned from the table.
    """
    space = graph.space
    s = space.WHITE
    chain = [s]
    total = 0.0
    while s != space.BLACK:
        succ = q.succ.get(s)
        if succ is None or len(succ) == 0:
            if len(chain) >= 2:
                q.prune(chain[-2], s)
            return None, ABORT_REWARD
        if rng.random() < config.epsilon:
            a = int(succ[rng.integers(len(succ))])
        else:
            v = q.values[s]
            top = np.nonzero(v == v.max())[0]
            a = int(succ[top[0] if len(top) == 1 else top[rng.integers(len(top))]])
        realized = a
        if len(succ) > 1 and rng.random() > config.success_prob:
            others = succ[succ != a]
            realized = int(others[rng.integers(len(others))])
        chain.append(realized)
        r = ctx.config.step_penalty
        if realized == space.BLACK:
            r += ctx.config.landing_reward + _episode_utility(graph, ctx, tuple(chain), theta)
        q_update(q, s, realized, r, realized, config.alpha, config.gamma)
        total += r
        s = realized
    return tuple(chain), total


@dataclass
class SearchResult:
    best: Trajectory | None
    best_reward: float
    trace: np.ndarray  # per-episode total reward, exactly `episodes` entries
    best_so_far: np.ndarray
    qualifying_rewards: list = field(default_factory=list)
    rng_seed: int = 0

    @property
    def found(self) -> bool:
        return self.best is not None


def _qualifies(
    chain: tuple,
    graph: ColorGraph,
    corpus_chains: set,
    gamut_cache: dict,
) -> bool:
    if chain in corpus_chains:
        return False  # not novel
    interior = chain[1:-1]
    if len(interior) < 2 or graph.seed_state not in interior:
        return False
    if chain not in gamut_cache:
        traj = Trajectory(
            labs=graph.space.labs[list(chain)],
            id="check",
            provenance="synthesized",
            state_ids=chain,
        )
        gamut_cache[chain] = cmod.interpolated_in_gamut(traj, graph.seed_lab)
    return gamut_cache[chain]


def search(
    graph: ColorGraph,
    theta,
    ctx: RewardContext,
    candidates,
    config: QLearningConfig | None = None,
    rng_seed: int = 0,
) -> SearchResult:
    """Run the episode budget and keep the best qualifying novel trajectory.

    Qualification: novel against the snapped corpus trajectories, at least two
    interior states including the seed state, and a fully in-gamut
    interpolation (checked lazily, only when an episode beats the incumbent).
    An empty result is a valid outcome.
    """
    config = config or QLearningConfig()
    theta = np.asarray(theta, dtype=float)
    rng = np.random.default_rng(rng_seed)
    q = QTable(graph, config.q0)
    corpus_chains = {t.state_ids for t in candidates}
    gamut_cache: dict = {}

    trace = np.empty(config.episodes)
    best_so_far = np.empty(config.episodes)
    best_chain = None
    best_reward = -np.inf
    qualifying: list = []

    for ep in range(config.episodes):
        chain, total = run_episode(graph, theta, config, q, rng, ctx)
        trace[ep] = total
        if chain is not None and total > best_reward:
            if _qualifies(chain, graph, corpus_chains, gamut_cache):
                best_chain = chain
                best_reward = total
                qualifying.append(total)
        best_so_far[ep] = best_reward

    best = None
    if best_chain is not None:
        best = Trajectory(
            labs=graph.space.labs[list(best_chain)],
            id=f"novel-{rng_seed}",
            provenance="synthesized",
            state_ids=best_chain,
        )
    return SearchResult(
        best=best,
        best_reward=float(best_reward) if best is not None else float("-inf"),
        trace=trace,
        best_so_far=best_so_far,
        qualifying_rewards=qualifying,
        rng_seed=rng_seed,
    )


def verify_result(
    result: SearchResult,
    graph: ColorGraph,
    candidates,
    ctx: RewardContext,
    theta,
) -> list[str]:
    """Independent re-check of the four acceptance criteria; empty = pass."""
    if result.best is None:
        return []
    problems = []
    chain = result.best.state_ids
    if chain in {t.state_ids for t in candidates}:
        problems.append("not novel: matches a corpus trajectory")
    interior = chain[1:-1]
    if len(interior) < 2:
        problems.append("fewer than 2 interior states")
    if graph.seed_state not in interior:
        problems.append("seed state missing from interior")
    if not cmod.interpolated_in_gamut(result.best, graph.seed_lab):
        problems.append("interpolated path leaves the gamut")
    # Episode accounting: landing + utility - per-action penalty.
    actions = len(chain) - 1
    phi = ctx.features(result.best)
    expected = (
        ctx.config.landing_reward
        + float(np.asarray(theta, float) @ phi)
        + ctx.config.step_penalty * actions
    )
    if abs(expected - result.best_reward) > 1e-9:
        problems.append(
            f"reward mismatch: recomputed {expected:.6f} vs stored {result.best_reward:.6f}"
        )
    if result.qualifying_rewards and result.best_reward < max(result.qualifying_rewards):
        problems.append("a qualifying episode beat the stored best")
    return problems


BENCHMARK_VARIANTS = {
    "optimistic": dict(q0=100.0, epsilon=0.1),
    "random": dict(q0=0.0, epsilon=1.0),
    "traditional": dict(q0=0.0, epsilon=0.1),
}


def benchmark_variants(
    graph: ColorGraph,
    thetas: dict,
    ctx: RewardContext,
    candidates,
    reps: int = 10,
    episodes: int = 10000,
    base_seed: int = 0,
):
    """Compare the three agent configurations on each preference model.

    Every (theta, repetition) triple shares one rng seed across variants.
    Returns rows of (variant, theta_id, rep, best reward minus landing) and
    the per-episode traces (landing reward subtracted, as in the convergence
    plots).
    """
    rows = []
    traces = {}
    landing = ctx.config.landing_reward
    for t_idx, (theta_id, theta) in enumerate(sorted(thetas.items())):
        for rep in range(reps):
            seed = int(np.random.default_rng([base_seed, t_idx, rep]).integers(2**31))
            for variant, overrides in BENCHMARK_VARIANTS.items():
                config = QLearningConfig(episodes=episodes, **overrides)
                res = search(graph, theta, ctx, candidates, config, rng_seed=seed)
                # Reward of the best colormap found (the qualifying result),
                # landing excluded; NaN when the search came up empty.
                best = res.best_reward - landing if res.found else float("nan")
                rows.append((variant, theta_id, rep, best))
                traces[(variant, theta_id, rep)] = res.trace - landing
    return rows, traces
