"""Trajectory features and the linear aesthetic utility model.

A trajectory is described by 9 numbers: 8 normalized distances from its
interior states to fixed perimeter anchors in the a*-b* plane, plus the
normalized slope of chroma against lightness. Utility is the dot product
of these features with a learned 9-vector of weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .colorspace import srgb_to_lab_array
from .environment import Trajectory

__all__ = [
    "FeatureVector",
    "RewardConfig",
    "RewardContext",
    "perimeter_anchors",
    "perimeter_distances",
    "chroma_slope",
    "featurize",
    "trajectory_reward",
]

N_FEATURES = 9

# One anchor per 45-degree hue step at mid lightness, all at the same chroma
# so hue-neutral trajectories score every perimeter identically. The shared
# chroma is the largest value that keeps every anchor in gamut at L* = 50
# (the teal/cyan hue is the binding constraint).
_ANCHOR_L = 50.0

_anchor_cache: dict = {}


def _common_anchor_chroma() -> float:
    from .colorspace import in_gamut_array

    best = np.inf
    for hue in np.radians(np.arange(0.0, 360.0, 45.0)):
        lo, hi = 0.0, 200.0
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            lab = np.array([_ANCHOR_L, mid * np.cos(hue), mid * np.sin(hue)])
            if in_gamut_array(lab):
                lo = mid
            else:
                hi = mid
        best = min(best, lo)
    return best


def _gamut_boundary_points(grid: int = 160) -> np.ndarray:
    """Lab image of the RGB cube faces; extreme distances live on this surface."""
    g = np.linspace(0.0, 1.0, grid)
    u, v = np.meshgrid(g, g)
    faces = []
    for fixed in (0.0, 1.0):
        w = np.full_like(u, fixed)
        faces.append(np.stack([w, u, v], -1).reshape(-1, 3))
        faces.append(np.stack([u, w, v], -1).reshape(-1, 3))
        faces.append(np.stack([u, v, w], -1).reshape(-1, 3))
    return srgb_to_lab_array(np.concatenate(faces))


def perimeter_anchors() -> tuple[np.ndarray, float]:
    """The 8 anchor points and the shared distance normalizer.

    The normalizer is the largest distance from any anchor to the sRGB gamut,
    shared across anchors so the 8 features stay mutually comparable.
    """
    if "anchors" not in _anchor_cache:
        hues = np.radians(np.arange(0.0, 360.0, 45.0))
        chroma = _common_anchor_chroma()
        anchors = np.stack(
            [
                np.full(8, _ANCHOR_L),
                chroma * np.cos(hues),
                chroma * np.sin(hues),
            ],
            axis=-1,
        )
        surface = _gamut_boundary_points()
        diffs = surface[None, :, :] - anchors[:, None, :]
        norm = float(np.linalg.norm(diffs, axis=-1).max())
        _anchor_cache["anchors"] = anchors
        _anchor_cache["norm"] = norm
    return _anchor_cache["anchors"], _anchor_cache["norm"]


@dataclass(frozen=True)
class FeatureVector:
    """8 perimeter distances in [0,1] plus the normalized chroma slope in [-1,1]."""

    k: np.ndarray  # (8,)
    m: float

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.k, [self.m]])


@dataclass(frozen=True)
class RewardConfig:
    landing_reward: float = 10.0
    step_penalty: float = -0.01
    anchors: np.ndarray = None
    anchor_norm: float = None

    def __post_init__(self):
        if self.anchors is None:
            anchors, norm = perimeter_anchors()
            object.__setattr__(self, "anchors", anchors)
            object.__setattr__(self, "anchor_norm", norm)
        if not self.landing_reward > 0:
            raise ValueError("landing reward must be positive")
        if not self.step_penalty < 0:
            raise ValueError("step penalty must be negative")


def _interior(t: Trajectory) -> np.ndarray:
    if len(t) < 3:
        raise ValueError(f"trajectory {t.id!r} has no interior states")
    return t.interior


def perimeter_distances(t: Trajectory, anchors=None, anchor_norm=None) -> np.ndarray:
    """Minimum distance from the interior states to each anchor, normalized."""
    if anchors is None or anchor_norm is None:
        anchors, anchor_norm = perimeter_anchors()
    pts = _interior(t)
    d = np.linalg.norm(pts[:, None, :] - anchors[None, :, :], axis=-1)
    return np.clip(d.min(axis=0) / anchor_norm, 0.0, 1.0)


def chroma_slope(t: Trajectory) -> float:
    """OLS slope of chroma regressed on lightness over the interior states."""
    pts = _interior(t)
    L = pts[:, 0]
    C = np.hypot(pts[:, 1], pts[:, 2])
    if np.ptp(L) < 1e-12:
        raise ValueError(f"trajectory {t.id!r}: interior lightness is constant")
    Lc = L - L.mean()
    return float(np.dot(Lc, C - C.mean()) / np.dot(Lc, Lc))


def featurize(t: Trajectory, config: RewardConfig, slope_norm: float) -> FeatureVector:
    """The 9-feature description of a trajectory.

    ``slope_norm`` is the largest absolute chroma slope over the session's
    aligned corpus trajectories; the slope feature is clamped to [-1, 1] for
    synthesized trajectories that exceed it.
    """
    k = perimeter_distances(t, config.anchors, config.anchor_norm)
    m = chroma_slope(t) / slope_norm
    return FeatureVector(k=k, m=float(np.clip(m, -1.0, 1.0)))


def trajectory_reward(t: Trajectory, theta, config: RewardConfig, slope_norm: float) -> float:
    """Linear utility theta . phi(t). Landing and step rewards are the planner's."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (N_FEATURES,):
        raise ValueError(f"theta must have {N_FEATURES} entries, got {theta.shape}")
    return float(theta @ featurize(t, config, slope_norm).to_array())


@dataclass
class RewardContext:
    """Session-scoped feature computation with caching.

    Bundles the reward configuration with the corpus-derived normalizers.
    Both the slope and the perimeter distances are normalized against the
    session's aligned candidates, so features spread over their full range
    and stay comparable within (but not across) sessions. Features are
    memoized per trajectory id, so ids must be stable within a session.
    """

    config: RewardConfig
    slope_norm: float
    anchor_min: np.ndarray | None = None  # (8,) per-anchor session minima
    anchor_span: np.ndarray | None = None  # (8,) per-anchor session ranges
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def for_candidates(cls, candidates, config: RewardConfig | None = None) -> "RewardContext":
        config = config or RewardConfig()
        slopes = [abs(chroma_slope(t)) for t in candidates]
        slope_norm = max(max(slopes), 1e-9)
        # Per-anchor min-max over the session's candidates: like the slope
        # normalizer, distances are only comparable within a session, and a
        # full [0, 1] spread is what gives the comparison likelihood its
        # discriminative power. Synthesized outliers clamp at the edges.
        dmat = np.stack(
            [
                np.linalg.norm(
                    _interior(t)[:, None, :] - config.anchors[None, :, :], axis=-1
                ).min(axis=0)
                for t in candidates
            ]
        )
        return cls(
            config=config,
            slope_norm=slope_norm,
            anchor_min=dmat.min(axis=0),
            anchor_span=np.maximum(np.ptp(dmat, axis=0), 1e-9),
        )

    def features(self, t: Trajectory) -> np.ndarray:
        key = t.state_ids if t.state_ids is not None else t.id
        if key not in self._cache:
            if self.anchor_min is not None:
                d = np.linalg.norm(
                    _interior(t)[:, None, :] - self.config.anchors[None, :, :], axis=-1
                ).min(axis=0)
                k = np.clip((d - self.anchor_min) / self.anchor_span, 0.0, 1.0)
                m = np.clip(chroma_slope(t) / self.slope_norm, -1.0, 1.0)
                self._cache[key] = np.concatenate([k, [m]])
            else:
                self._cache[key] = featurize(t, self.config, self.slope_norm).to_array()
        return self._cache[key]

    def reward(self, t: Trajectory, theta) -> float:
        return float(np.asarray(theta, float) @ self.features(t))

    def feature_matrix(self, trajectories) -> np.ndarray:
        return np.stack([self.features(t) for t in trajectories])
