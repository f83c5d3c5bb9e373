"""Active preference learning over trajectory utilities.

The belief over the 9 feature weights is a set of unit-norm posterior
samples, refreshed after every response by Metropolis-Hastings over the
unit hypersphere. Queries are acquired by disagreement: pick two plausible
but mutually distant weight samples and show each one's favorite candidate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import gaussian_kde

from .environment import Trajectory
from .reward import N_FEATURES, RewardContext

__all__ = [
    "INDIFFERENT",
    "LEFT",
    "RIGHT",
    "Query",
    "PreferenceModel",
    "likelihood",
    "sample_posterior",
    "update_belief",
    "acquire_query",
    "rank_corpus",
    "teach_loop",
    "simulated_oracle",
]

INDIFFERENT, LEFT, RIGHT = 0, 1, 2

DEFAULT_DELTA = 0.01
DEFAULT_LAMBDA = 500.0
DEFAULT_M = 100
MH_BURNIN = 500
MH_THIN = 30
MH_SIGMA = 0.25


@dataclass(frozen=True)
class Query:
    left: Trajectory
    right: Trajectory

    def __post_init__(self):
        if self.left.id == self.right.id:
            raise ValueError("query must compare two distinct trajectories")

    @property
    def pair_key(self) -> frozenset:
        return frozenset((self.left.id, self.right.id))


@dataclass(frozen=True)
class PreferenceModel:
    """Posterior samples over the utility weights plus the response history."""

    samples: np.ndarray  # (M, 9), unit rows
    delta: float = DEFAULT_DELTA
    lam: float = DEFAULT_LAMBDA
    history: tuple = ()  # ((Query, response int), ...)

    def __post_init__(self):
        w = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", w)
        object.__setattr__(self, "history", tuple(self.history))

    @property
    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=0)

    @classmethod
    def prior(cls, rng, m: int = DEFAULT_M, delta: float = DEFAULT_DELTA,
              lam: float = DEFAULT_LAMBDA) -> "PreferenceModel":
        """Non-informative prior: uniform samples on the unit hypersphere."""
        rng = np.random.default_rng(rng)
        w = rng.normal(size=(m, N_FEATURES))
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        return cls(samples=w, delta=delta, lam=lam)

    def to_doc(self) -> dict:
        return {
            "format": "preference-model/1",
            "delta": self.delta,
            "lambda": self.lam,
            "samples": [[float(v) for v in w] for w in self.samples],
            "history": [
                {"left": q.left.id, "right": q.right.id, "choice": int(resp)}
                for q, resp in self.history
            ],
        }

    @classmethod
    def from_doc(cls, doc: dict, candidates=()) -> "PreferenceModel":
        """Rebuild a model from its document, for session resume or audit.

        History queries are reattached by id against ``candidates``; entries
        whose trajectories are no longer present are dropped.
        """
        by_id = {t.id: t for t in candidates}
        history = []
        for h in doc.get("history", []):
            left, right = by_id.get(h["left"]), by_id.get(h["right"])
            if left is not None and right is not None:
                history.append((Query(left=left, right=right), int(h["choice"])))
        return cls(
            samples=np.asarray(doc["samples"], dtype=float),
            delta=float(doc.get("delta", DEFAULT_DELTA)),
            lam=float(doc.get("lambda", DEFAULT_LAMBDA)),
            history=tuple(history),
        )


def _log_choice_prob(gap, delta: float):
    """log P(preferring the option whose reward leads by ``gap``).

    The minimum-perceivable-difference form; at delta = 0 it is the softmax.
    """
    return -np.logaddexp(0.0, delta - gap)


def likelihood(response: int, query: Query, theta, delta: float, ctx: RewardContext) -> float:
    """Probability of a response to a query under weights ``theta``.

    Choices use the minimum-perceivable-difference form, which reduces to the
    plain softmax at delta = 0; indifference is (e^{2 delta} - 1) times the
    product of the two choice probabilities.
    """
    gap = ctx.reward(query.left, theta) - ctx.reward(query.right, theta)
    if response == LEFT:
        return float(np.exp(_log_choice_prob(gap, delta)))
    if response == RIGHT:
        return float(np.exp(_log_choice_prob(-gap, delta)))
    if response == INDIFFERENT:
        if delta <= 0:
            return 0.0
        log_p = (
            np.log(np.expm1(2.0 * delta))
            + _log_choice_prob(gap, delta)
            + _log_choice_prob(-gap, delta)
        )
        return float(np.exp(log_p))
    raise ValueError(f"unknown response {response!r}")


def _history_log_likelihood(theta, gaps: np.ndarray, responses: np.ndarray, delta: float):
    """Sum of log likelihoods over recorded responses; ``gaps`` is (T, 9)."""
    g = gaps @ theta
    total = 0.0
    left = responses == LEFT
    right = responses == RIGHT
    both = responses == INDIFFERENT
    total += _log_choice_prob(g[left], delta).sum()
    total += _log_choice_prob(-g[right], delta).sum()
    if np.any(both):
        total += (
            np.log(np.expm1(2.0 * delta)) * both.sum()
            + _log_choice_prob(g[both], delta).sum()
            + _log_choice_prob(-g[both], delta).sum()
        )
    return total


def sample_posterior(
    gaps: np.ndarray,
    responses: np.ndarray,
    delta: float,
    rng,
    m: int = DEFAULT_M,
    init=None,
    sigma: float = MH_SIGMA,
    burnin: int = MH_BURNIN,
    thin: int = MH_THIN,
) -> np.ndarray:
    """Metropolis-Hastings over the unit hypersphere.

    The proposal adds isotropic Gaussian noise and re-projects onto the
    sphere. With an empty history the posterior equals the uniform prior and
    is sampled directly.
    """
    rng = np.random.default_rng(rng)
    if len(responses) == 0:
        w = rng.normal(size=(m, N_FEATURES))
        return w / np.linalg.norm(w, axis=1, keepdims=True)

    if init is None or np.linalg.norm(init) < 1e-9:
        theta = rng.normal(size=N_FEATURES)
    else:
        theta = np.asarray(init, dtype=float)
    theta = theta / np.linalg.norm(theta)

    log_p = _history_log_likelihood(theta, gaps, responses, delta)
    out = np.empty((m, N_FEATURES))
    kept = 0
    step = 0
    while kept < m:
        prop = theta + sigma * rng.normal(size=N_FEATURES)
        prop /= np.linalg.norm(prop)
        log_p_prop = _history_log_likelihood(prop, gaps, responses, delta)
        if np.log(rng.uniform()) < log_p_prop - log_p:
            theta, log_p = prop, log_p_prop
        step += 1
        if step > burnin and (step - burnin) % thin == 0:
            out[kept] = theta
            kept += 1
    return out


def update_belief(
    model: PreferenceModel, query: Query, response: int, ctx: RewardContext, rng
) -> PreferenceModel:
    """Record the response and resample the posterior, seeding at the old mean."""
    if response not in (INDIFFERENT, LEFT, RIGHT):
        raise ValueError(f"invalid response {response!r}")
    history = model.history + ((query, response),)
    gaps = np.stack([ctx.features(q.left) - ctx.features(q.right) for q, _ in history])
    responses = np.array([resp for _, resp in history])
    samples = sample_posterior(
        gaps, responses, model.delta, rng, m=len(model.samples), init=model.mean
    )
    return replace(model, samples=samples, history=history)


def _sample_densities(samples: np.ndarray) -> np.ndarray:
    """Gaussian KDE density of each sample (Scott's rule); uniform on failure."""
    try:
        kde = gaussian_kde(samples.T)
        return kde(samples.T)
    except np.linalg.LinAlgError:
        # Collapsed posterior: the density term then carries no information.
        return np.ones(len(samples))


def acquire_query(model: PreferenceModel, candidates, ctx: RewardContext) -> Query:
    """Query by disagreement over the posterior samples.

    Scores every sample pair by density product plus lambda times their
    distance, then shows each chosen sample's favorite candidate. Unordered
    pairs that were already answered are skipped while an unanswered pair
    exists.
    """
    if len(candidates) < 2:
        raise ValueError("need at least 2 candidates to form a query")
    w = model.samples
    m = len(w)
    dens = _sample_densities(w)
    dist = np.linalg.norm(w[:, None, :] - w[None, :, :], axis=-1)
    score = dens[:, None] * dens[None, :] + model.lam * dist
    iu, ju = np.triu_indices(m, k=1)
    order = np.argsort(-score[iu, ju], kind="stable")

    phi = ctx.feature_matrix(candidates)  # (C, 9)
    answered = {q.pair_key for q, _ in model.history}

    def pick(widx: int, exclude: int = -1) -> int:
        utilities = phi @ w[widx]
        if exclude >= 0:
            utilities = utilities.copy()
            utilities[exclude] = -np.inf
        return int(np.argmax(utilities))

    fallback = None
    for rank in order:
        i, j = int(iu[rank]), int(ju[rank])
        ci = pick(i)
        cj = pick(j)
        if ci == cj:
            cj = pick(j, exclude=ci)
        q = Query(left=candidates[ci], right=candidates[cj])
        if fallback is None:
            fallback = q
        if q.pair_key not in answered:
            return q

    # Every scored pair repeats an answered query: fall back to the best
    # unanswered candidate pair under the posterior mean, if there is one.
    mean_utils = phi @ model.mean
    pairs = [
        (ci, cj)
        for ci in range(len(candidates))
        for cj in range(ci + 1, len(candidates))
        if frozenset((candidates[ci].id, candidates[cj].id)) not in answered
    ]
    if pairs:
        ci, cj = max(pairs, key=lambda p: (mean_utils[p[0]] + mean_utils[p[1]], -p[0], -p[1]))
        return Query(left=candidates[ci], right=candidates[cj])
    return fallback


def rank_corpus(model: PreferenceModel, candidates, ctx: RewardContext):
    """Candidates scored by the posterior mean, descending; id breaks ties."""
    scores = ctx.feature_matrix(candidates) @ model.mean
    order = sorted(range(len(candidates)), key=lambda i: (-scores[i], candidates[i].id))
    return [(candidates[i], float(scores[i])) for i in order]


def teach_loop(
    model: PreferenceModel,
    candidates,
    ctx: RewardContext,
    n: int,
    respond,
    rng,
) -> PreferenceModel:
    """Run ``n`` rounds of acquire -> respond -> update.

    ``respond`` maps a Query to a response code; it may raise StopIteration
    to abort, in which case the partial model is returned.
    """
    rng = np.random.default_rng(rng)
    for _ in range(n):
        query = acquire_query(model, candidates, ctx)
        try:
            response = respond(query)
        except StopIteration:
            break
        model = update_belief(model, query, response, ctx, rng)
    return model


def simulated_oracle(theta_star, ctx: RewardContext, noiseless: bool, rng):
    """A response source driven by a hidden weight vector.

    Noiseless: picks the truly better side, answering indifferent when the
    reward gap is below delta. Noisy: samples the response from the
    likelihood model itself.
    """
    theta_star = np.asarray(theta_star, dtype=float)
    rng = np.random.default_rng(rng)

    def respond(query: Query, delta: float = DEFAULT_DELTA) -> int:
        gap = ctx.reward(query.left, theta_star) - ctx.reward(query.right, theta_star)
        if noiseless:
            if abs(gap) < delta:
                return INDIFFERENT
            return LEFT if gap > 0 else RIGHT
        p_left = np.exp(_log_choice_prob(gap, delta))
        p_right = np.exp(_log_choice_prob(-gap, delta))
        p_both = max(np.expm1(2 * delta) * p_left * p_right, 0.0)
        probs = np.array([p_both, p_left, p_right])
        probs /= probs.sum()
        return int(rng.choice(3, p=probs))

    return respond
