"""From trajectory to display-ready colormap.

A trajectory's control points are approximated by a clamped cubic B-spline
that passes exactly through the endpoints and the user's seed color, the
curve is truncated where lightness crosses 10, and 256 colors are sampled
at CIEDE2000-equidistant rectified arc lengths. Strict lightness descent
is enforced and every sample is clipped into the sRGB gamut.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline
from scipy.optimize import isotonic_regression

from .colorspace import (
    RgbColor,
    delta_e_2000,
    format_hex,
    gamut_clip_array,
    in_gamut_array,
    lab_to_srgb_array,
)
from .environment import Trajectory

__all__ = [
    "Curve",
    "UniformityProfile",
    "ContinuousColormap",
    "fit_spline",
    "fit_through_seed",
    "uniformize",
    "finalize",
    "interpolated_in_gamut",
    "profile",
    "to_hex_list",
    "to_csv",
]

log = logging.getLogger(__name__)

N_SAMPLES = 256
DENSE_GRID = 1024
TRUNCATE_L = 10.0


class Curve:
    """A parametric Lab curve on [0, 1]."""

    def evaluate(self, t) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t) -> np.ndarray:
        return self.evaluate(t)


class _BSplineCurve(Curve):
    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        n = len(points)
        k = min(3, n - 1)
        # Chord-length parameters; interior knots by the averaging rule.
        chord = np.linalg.norm(np.diff(points, axis=0), axis=1)
        total = chord.sum()
        if total == 0:
            raise ValueError("degenerate control polygon")
        u = np.concatenate([[0.0], np.cumsum(chord)]) / total
        interior = [u[i : i + k].mean() for i in range(1, n - k)]
        knots = np.concatenate([np.zeros(k + 1), interior, np.ones(k + 1)])
        self._spline = BSpline(knots, points, k)

    def evaluate(self, t) -> np.ndarray:
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        return self._spline(t)


class _JoinedCurve(Curve):
    """Two curves sharing one junction point, re-parametrized onto [0, 1]."""

    def __init__(self, left: Curve, right: Curve, split: float):
        self.left = left
        self.right = right
        self.split = float(split)

    def evaluate(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((len(t), 3))
        lo = t <= self.split
        out[lo] = self.left.evaluate(t[lo] / self.split)
        out[~lo] = self.right.evaluate((t[~lo] - self.split) / (1.0 - self.split))
        return out


class _TruncatedCurve(Curve):
    def __init__(self, base: Curve, t_max: float):
        self.base = base
        self.t_max = float(t_max)

    def evaluate(self, t) -> np.ndarray:
        return self.base.evaluate(np.asarray(t, dtype=float) * self.t_max)


def fit_spline(points) -> Curve:
    """Clamped approximating B-spline through a control polygon.

    Cubic for 4+ points; 2 or 3 control points degrade to a linear or
    quadratic curve. The first and last points are interpolated exactly.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3 or len(points) < 2:
        raise ValueError("need at least 2 Lab control points")
    return _BSplineCurve(points)


def fit_through_seed(points, seed_index: int) -> Curve:
    """Spline that additionally interpolates the control point at ``seed_index``.

    Built by fitting the two halves separately and joining them at the seed,
    which pins the curve to the seed exactly (C0 there) while keeping the
    approximating behavior elsewhere.
    """
    points = np.asarray(points, dtype=float)
    if not 0 < seed_index < len(points) - 1:
        raise ValueError("seed index must be interior")
    left = fit_spline(points[: seed_index + 1])
    right = fit_spline(points[seed_index:])
    chord = np.linalg.norm(np.diff(points, axis=0), axis=1)
    split = chord[:seed_index].sum() / chord.sum()
    return _JoinedCurve(left, right, split)


def uniformize(curve: Curve, n_out: int = N_SAMPLES, grid: int = DENSE_GRID) -> np.ndarray:
    """Sample ``n_out`` colors equidistant in CIEDE2000 rectified arc length.

    Cumulative arc lengths over a dense parameter grid are normalized and
    inverted by monotone piecewise-linear interpolation; the outputs are the
    curve values at the inverse images of a uniform grid.
    """
    t = np.linspace(0.0, 1.0, grid)
    pts = curve.evaluate(t)
    gaps = delta_e_2000(pts[:-1], pts[1:])
    s = np.concatenate([[0.0], np.cumsum(gaps)])
    if s[-1] <= 0:
        raise ValueError("zero-length curve")
    s_hat = s / s[-1]
    t_star = np.interp(np.linspace(0.0, 1.0, n_out), s_hat, t)
    return curve.evaluate(t_star)


@dataclass(frozen=True)
class UniformityProfile:
    """Adjacent CIEDE2000 gaps, total arc length, flatness, lightness series."""

    gaps: np.ndarray  # (n-1,)
    total_length: float
    flatness: float  # 1 - std(gaps) / total_length
    lightness: np.ndarray  # (n,)

    def to_doc(self) -> dict:
        return {
            "gaps": [float(g) for g in self.gaps],
            "total_length": float(self.total_length),
            "flatness": float(self.flatness),
            "lightness": [float(v) for v in self.lightness],
        }


def profile(colors) -> UniformityProfile:
    """Uniformity profile of a sampled colormap (Lab array or ContinuousColormap)."""
    labs = colors.labs if isinstance(colors, ContinuousColormap) else np.asarray(colors, float)
    gaps = delta_e_2000(labs[:-1], labs[1:])
    total = float(gaps.sum())
    flatness = 1.0 - float(np.std(gaps)) / total if total > 0 else float("-inf")
    return UniformityProfile(
        gaps=gaps, total_length=total, flatness=flatness, lightness=labs[:, 0].copy()
    )


@dataclass(frozen=True)
class ContinuousColormap:
    """256 gamut colors, strictly decreasing in L, uniform in CIEDE2000."""

    labs: np.ndarray  # (256, 3)
    source: Trajectory
    profile: UniformityProfile
    monotonicity_repaired: bool = False

    def hex_colors(self) -> list[str]:
        return to_hex_list(self)

    def violations(self, flatness_floor: float = 0.99) -> list[str]:
        """Invariant check; empty list means a valid colormap."""
        out = []
        if self.labs.shape != (N_SAMPLES, 3):
            out.append(f"expected {N_SAMPLES} samples, got {len(self.labs)}")
        dL = np.diff(self.labs[:, 0])
        if not np.all(dL < 0):
            idx = int(np.argmax(dL >= 0))
            out.append(f"lightness inversion at sample {idx}")
        if self.profile.flatness < flatness_floor:
            out.append(f"flatness {self.profile.flatness:.4f} below {flatness_floor}")
        if not np.all(in_gamut_array(self.labs, tol=1e-4)):
            idx = int(np.argmin(in_gamut_array(self.labs, tol=1e-4)))
            out.append(f"sample {idx} out of gamut")
        last_L = float(self.labs[-1, 0])
        if not TRUNCATE_L <= last_L <= TRUNCATE_L + 2.0:
            out.append(f"last lightness {last_L:.3f} outside [10, 12]")
        return out

    def to_doc(self, seed_hex: str | None = None, reward: float | None = None) -> dict:
        return {
            "format": "colormap/1",
            "id": self.source.id,
            "provenance": self.source.provenance,
            "seed_color": seed_hex,
            "reward": reward,
            "colors": self.hex_colors(),
            "lab": [[float(v) for v in p] for p in self.labs],
            "profile": self.profile.to_doc(),
        }


def _seed_substituted(traj: Trajectory, seed_lab) -> tuple[np.ndarray, int]:
    """Replace an interior control point with the exact seed color.

    Prefers positions where the seed's lightness stays bracketed by its
    neighbors, so the control polygon keeps its strict descent; among those
    the point nearest the seed is replaced. Falls back to the overall nearest
    point when no position is order-compatible (isotonic repair then covers
    any inversion downstream).
    """
    pts = traj.labs.copy()
    seed_lab = np.asarray(seed_lab, dtype=float)
    L = pts[:, 0]
    n = len(pts)
    d = np.linalg.norm(pts[1:-1] - seed_lab, axis=1)
    feasible = [
        j
        for j in range(1, n - 1)
        if L[j - 1] > seed_lab[0] and seed_lab[0] > L[j + 1]
    ]
    if feasible:
        idx = min(feasible, key=lambda j: d[j - 1])
    else:
        idx = 1 + int(np.argmin(d))
    pts[idx] = seed_lab
    return pts, idx


def _truncated_curve(traj: Trajectory, seed_lab) -> Curve:
    pts, seed_idx = _seed_substituted(traj, seed_lab)
    curve = fit_through_seed(pts, seed_idx)
    # Lightness decreases along the curve (monotone control polygon), so the
    # L = 10 crossing is unique; bisect keeping the >= 10 side.
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(curve.evaluate(mid)[0][0]) >= TRUNCATE_L:
            lo = mid
        else:
            hi = mid
    return _TruncatedCurve(curve, lo)


def interpolated_in_gamut(traj: Trajectory, seed_lab, tol: float = 1e-6) -> bool:
    """Whether all 256 raw samples of the interpolated path stay in gamut."""
    samples = uniformize(_truncated_curve(traj, seed_lab))
    return bool(np.all(in_gamut_array(samples, tol=tol)))


def _force_strict_descent(L: np.ndarray) -> np.ndarray:
    dec = isotonic_regression(-L, increasing=True)
    L = -np.asarray(dec.x)
    # Isotonic projection allows ties; break them with a vanishing ramp.
    for i in range(1, len(L)):
        if L[i] >= L[i - 1]:
            L[i] = L[i - 1] - 1e-9
    return L


def finalize(traj: Trajectory, seed_lab) -> ContinuousColormap:
    """Render a trajectory into its display-ready 256-color form.

    Substitutes the exact seed color, fits the seed-interpolating spline,
    truncates the domain at L = 10, samples 256 CIEDE2000-equidistant colors,
    repairs any lightness inversion by isotonic projection of L (a and b
    untouched), and clips every sample into the gamut.
    """
    samples = uniformize(_truncated_curve(traj, seed_lab))
    repaired = False
    if not np.all(np.diff(samples[:, 0]) < 0):
        repaired = True
        log.debug("lightness inversion repaired for trajectory %s", traj.id)
        samples[:, 0] = _force_strict_descent(samples[:, 0])
    samples = gamut_clip_array(samples, chroma_tol=0.01)
    return ContinuousColormap(
        labs=samples,
        source=traj,
        profile=profile(samples),
        monotonicity_repaired=repaired,
    )


def to_hex_list(cm: ContinuousColormap) -> list[str]:
    """256 hex strings, gamut-clipped then rounded to 8 bits per channel."""
    rgb = np.clip(lab_to_srgb_array(gamut_clip_array(cm.labs, chroma_tol=0.01)), 0.0, 1.0)
    return [format_hex(RgbColor(*row)) for row in rgb]


def to_csv(cm: ContinuousColormap) -> str:
    """CSV of (index, L, a, b, r, g, b) rows for external tooling."""
    rgb = np.clip(lab_to_srgb_array(gamut_clip_array(cm.labs, chroma_tol=0.01)), 0.0, 1.0)
    lines = ["index,L,a,b,r,g,b"]
    for i, (lab, c) in enumerate(zip(cm.labs, rgb)):
        lines.append(
            f"{i},{lab[0]:.4f},{lab[1]:.4f},{lab[2]:.4f},{c[0]:.6f},{c[1]:.6f},{c[2]:.6f}"
        )
    return "\n".join(lines) + "\n"
