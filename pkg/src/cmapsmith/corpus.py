"""Loading, validation, and persistence of the expert-colormap corpus.

Corpus document format (JSON):

    {"name": str,
     "colormaps": [{"id": str, "source": str,
                    "colors": ["#RRGGBB" | [L, a, b], ...]}]}

Every loaded colormap carries exactly nine control points, strictly
monotone in lightness, stored light-to-dark.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .colorspace import LabColor, delta_e_2000, hex_to_lab, lab_to_hex

__all__ = [
    "CorpusError",
    "ExpertColormap",
    "Corpus",
    "resample_to_nine",
    "load_corpus",
    "save_corpus",
    "load_starter_corpus",
    "starter_corpus_path",
]

N_CONTROL_POINTS = 9


class CorpusError(ValueError):
    """Raised when a corpus document fails to parse or validate."""


@dataclass(frozen=True)
class ExpertColormap:
    """An expert-designed sequential colormap, reduced to 9 Lab control points."""

    id: str
    source: str
    points: np.ndarray  # (9, 3), L strictly decreasing

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.shape != (N_CONTROL_POINTS, 3):
            raise CorpusError(
                f"colormap {self.id!r}: expected {N_CONTROL_POINTS} control points, "
                f"got {pts.shape[0]}"
            )
        dL = np.diff(pts[:, 0])
        if not np.all(dL < 0):
            raise CorpusError(f"colormap {self.id!r}: lightness is not strictly decreasing")

    def control_points(self) -> list[LabColor]:
        return [LabColor.from_array(p) for p in self.points]


@dataclass(frozen=True)
class Corpus:
    name: str
    colormaps: tuple[ExpertColormap, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "colormaps", tuple(self.colormaps))
        if not self.colormaps:
            raise CorpusError("empty corpus")
        ids = [cm.id for cm in self.colormaps]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise CorpusError(f"duplicate colormap ids: {dupes}")

    def __len__(self) -> int:
        return len(self.colormaps)

    def __iter__(self):
        return iter(self.colormaps)


def resample_to_nine(colors, n_dense: int = 8192) -> np.ndarray:
    """Pick 9 points equidistant in cumulative CIEDE2000 arc length.

    The input polyline (>= 2 Lab colors) is densified by linear interpolation,
    the CIEDE2000 arc-length table is accumulated over the dense samples, and
    the 9 outputs are read off at equal arc fractions. Endpoints are preserved
    exactly.
    """
    pts = np.asarray(
        [c.to_array() if isinstance(c, LabColor) else np.asarray(c, float) for c in colors],
        dtype=float,
    )
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
        raise CorpusError("resampling needs at least 2 Lab colors")

    # Chord-length parametrization, then a dense uniform refinement of it.
    chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    u = np.concatenate([[0.0], np.cumsum(chord)])
    total_chord = u[-1]
    if total_chord == 0:
        raise CorpusError("resampling needs at least 2 distinct colors")
    u /= total_chord
    # Keep original vertices in the dense grid so corners are not smoothed over.
    t = np.unique(np.concatenate([np.linspace(0.0, 1.0, n_dense), u]))
    dense = np.stack([np.interp(t, u, pts[:, k]) for k in range(3)], axis=-1)

    gaps = delta_e_2000(dense[:-1], dense[1:])
    s = np.concatenate([[0.0], np.cumsum(gaps)])
    targets = np.linspace(0.0, s[-1], N_CONTROL_POINTS)
    t_out = np.interp(targets, s, t)
    out = np.stack([np.interp(t_out, t, dense[:, k]) for k in range(3)], axis=-1)
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out


def _parse_color(raw, cm_id: str) -> np.ndarray:
    if isinstance(raw, str):
        return hex_to_lab(raw).to_array()
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (3,):
        raise CorpusError(f"colormap {cm_id!r}: bad color entry {raw!r}")
    return arr


def _normalize_direction(points: np.ndarray) -> np.ndarray:
    """Store light-to-dark: flip sequences that increase in L."""
    if points[0, 0] < points[-1, 0]:
        return points[::-1].copy()
    return points


def load_corpus(path, resample_irregular: bool = False) -> Corpus:
    """Load and validate a corpus document.

    Entries must carry exactly 9 control points unless ``resample_irregular``
    is set, in which case ramps of any length >= 2 are resampled to 9
    CIEDE2000-equidistant points.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise CorpusError(f"cannot read corpus file {path}: {e}") from e
    if not text.strip():
        raise CorpusError("empty corpus")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorpusError(f"corpus file {path} is not valid JSON: {e}") from e

    entries = doc.get("colormaps", [])
    if not entries:
        raise CorpusError("empty corpus")

    colormaps = []
    for entry in entries:
        cm_id = entry.get("id")
        if not cm_id:
            raise CorpusError("colormap entry without an id")
        colors = entry.get("colors", [])
        pts = np.asarray([_parse_color(c, cm_id) for c in colors], dtype=float)
        if len(pts) != N_CONTROL_POINTS:
            if not resample_irregular:
                raise CorpusError(
                    f"colormap {cm_id!r}: expected {N_CONTROL_POINTS} control points, "
                    f"got {len(pts)}"
                )
            if len(pts) < 2:
                raise CorpusError(f"colormap {cm_id!r}: needs at least 2 colors")
            pts = resample_to_nine(pts)
        pts = _normalize_direction(pts)
        colormaps.append(ExpertColormap(id=cm_id, source=entry.get("source", ""), points=pts))
    return Corpus(name=doc.get("name", path.stem), colormaps=tuple(colormaps))


def save_corpus(corp: Corpus, path) -> None:
    doc = {
        "name": corp.name,
        "colormaps": [
            {
                "id": cm.id,
                "source": cm.source,
                "colors": [[round(float(v), 4) for v in p] for p in cm.points],
            }
            for cm in corp.colormaps
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def starter_corpus_path() -> Path:
    return Path(resources.files("cmapsmith").joinpath("data/starter_corpus.json"))


def load_starter_corpus() -> Corpus:
    """The bundled starter corpus of publicly licensed sequential colormaps."""
    return load_corpus(starter_corpus_path())


def corpus_hex_preview(cm: ExpertColormap) -> list[str]:
    """Hex strings of the control points (clamped), light to dark."""
    return [lab_to_hex(LabColor.from_array(p)) for p in cm.points]
