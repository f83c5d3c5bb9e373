"""CIELAB geometry, sRGB conversion, gamut tests, and the CIEDE2000 metric.

All conversions assume the sRGB working space with a D65 white point and
run in double precision. Functions ending in ``_array`` operate on numpy
arrays of shape (..., 3); the scalar API wraps them around ``LabColor``
and ``RgbColor`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LabColor",
    "RgbColor",
    "WHITE",
    "BLACK",
    "delta_e_2000",
    "lab_to_srgb",
    "lab_to_srgb_array",
    "srgb_to_lab",
    "srgb_to_lab_array",
    "in_gamut",
    "in_gamut_array",
    "gamut_clip",
    "gamut_clip_array",
    "parse_hex",
    "format_hex",
    "hex_to_lab",
    "lab_to_hex",
]


@dataclass(frozen=True)
class LabColor:
    """A point in CIELAB: lightness L in [0, 100], opponent axes a and b."""

    L: float
    a: float
    b: float

    def chroma(self) -> float:
        return math.hypot(self.a, self.b)

    def hue_angle(self) -> float:
        """Hue angle in degrees, in [0, 360)."""
        h = math.degrees(math.atan2(self.b, self.a))
        return h % 360.0

    def to_array(self) -> np.ndarray:
        return np.array([self.L, self.a, self.b], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "LabColor":
        L, a, b = (float(v) for v in np.asarray(arr, dtype=float).reshape(3))
        return cls(L, a, b)


@dataclass(frozen=True)
class RgbColor:
    """sRGB color with channels in [0, 1] (D65 white)."""

    r: float
    g: float
    b: float

    def to_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=float)


WHITE = LabColor(100.0, 0.0, 0.0)
BLACK = LabColor(0.0, 0.0, 0.0)

# D65 reference white (2-degree observer).
_XN, _YN, _ZN = 95.047, 100.0, 108.883

# XYZ (scaled to [0,1]) <-> linear sRGB.
_M_XYZ_TO_RGB = np.array(
    [
        [3.2404542, -1.5371385, -0.4985314],
        [-0.9692660, 1.8760108, 0.0415560],
        [0.0556434, -0.2040259, 1.0572252],
    ]
)
_M_RGB_TO_XYZ = np.linalg.inv(_M_XYZ_TO_RGB)

_DELTA = 6.0 / 29.0


def _as_lab_array(c) -> np.ndarray:
    if isinstance(c, LabColor):
        return c.to_array()
    return np.asarray(c, dtype=float)


def lab_to_srgb_array(lab) -> np.ndarray:
    """Exact Lab -> sRGB via XYZ. No clamping: out-of-gamut channels exit [0,1]."""
    lab = np.asarray(lab, dtype=float)
    L, a, b = lab[..., 0], lab[..., 1], lab[..., 2]
    fy = (L + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0

    def f_inv(t):
        return np.where(t > _DELTA, t**3, 3.0 * _DELTA**2 * (t - 4.0 / 29.0))

    xyz = np.stack([f_inv(fx) * _XN, f_inv(fy) * _YN, f_inv(fz) * _ZN], axis=-1) / 100.0
    lin = xyz @ _M_XYZ_TO_RGB.T
    # Piecewise sRGB transfer curve; sign-preserving so negatives stay negative.
    return np.where(
        np.abs(lin) <= 0.0031308,
        12.92 * lin,
        np.sign(lin) * (1.055 * np.abs(lin) ** (1.0 / 2.4) - 0.055),
    )


def srgb_to_lab_array(rgb) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=float)
    lin = np.where(
        np.abs(rgb) <= 0.04045,
        rgb / 12.92,
        np.sign(rgb) * ((np.abs(rgb) + 0.055) / 1.055) ** 2.4,
    )
    xyz = (lin @ _M_RGB_TO_XYZ.T) * 100.0
    xr, yr, zr = xyz[..., 0] / _XN, xyz[..., 1] / _YN, xyz[..., 2] / _ZN

    def f(t):
        return np.where(t > _DELTA**3, np.cbrt(t), t / (3.0 * _DELTA**2) + 4.0 / 29.0)

    fx, fy, fz = f(xr), f(yr), f(zr)
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def in_gamut_array(lab, tol: float = 1e-6) -> np.ndarray:
    rgb = lab_to_srgb_array(lab)
    return np.all((rgb >= -tol) & (rgb <= 1.0 + tol), axis=-1)


def in_gamut(c, tol: float = 1e-6) -> bool:
    """True iff the color converts to sRGB with every channel inside [0,1] (tol slack)."""
    return bool(in_gamut_array(_as_lab_array(c), tol=tol))


def lab_to_srgb(c: LabColor, clamp: bool = False):
    """Convert to sRGB. Returns None when out of gamut, unless ``clamp`` is set."""
    rgb = lab_to_srgb_array(_as_lab_array(c))
    if not clamp and not np.all((rgb >= -1e-6) & (rgb <= 1.0 + 1e-6)):
        return None
    rgb = np.clip(rgb, 0.0, 1.0)
    return RgbColor(float(rgb[0]), float(rgb[1]), float(rgb[2]))


def srgb_to_lab(c: RgbColor) -> LabColor:
    return LabColor.from_array(srgb_to_lab_array(c.to_array()))


_POW7_25 = 25.0**7


def delta_e_2000(x, y, kL: float = 1.0, kC: float = 1.0, kH: float = 1.0):
    """CIEDE2000 color difference, including the blue-region hue rotation term.

    Accepts ``LabColor`` values or arrays of shape (..., 3); broadcasting
    applies. Returns a float for scalar inputs, an array otherwise.
    """
    lab1 = _as_lab_array(x)
    lab2 = _as_lab_array(y)
    scalar = lab1.ndim == 1 and lab2.ndim == 1

    L1, a1, b1 = lab1[..., 0], lab1[..., 1], lab1[..., 2]
    L2, a2, b2 = lab2[..., 0], lab2[..., 1], lab2[..., 2]

    C1 = np.hypot(a1, b1)
    C2 = np.hypot(a2, b2)
    C_bar = 0.5 * (C1 + C2)
    c7 = C_bar**7
    G = 0.5 * (1.0 - np.sqrt(c7 / (c7 + _POW7_25)))

    a1p = (1.0 + G) * a1
    a2p = (1.0 + G) * a2
    C1p = np.hypot(a1p, b1)
    C2p = np.hypot(a2p, b2)

    h1p = np.where((a1p == 0) & (b1 == 0), 0.0, np.arctan2(b1, a1p) % (2 * np.pi))
    h2p = np.where((a2p == 0) & (b2 == 0), 0.0, np.arctan2(b2, a2p) % (2 * np.pi))

    dLp = L2 - L1
    dCp = C2p - C1p

    zero_chroma = (C1p * C2p) == 0
    dhp = h2p - h1p
    dhp = np.where(dhp > np.pi, dhp - 2 * np.pi, dhp)
    dhp = np.where(dhp < -np.pi, dhp + 2 * np.pi, dhp)
    dhp = np.where(zero_chroma, 0.0, dhp)
    dHp = 2.0 * np.sqrt(C1p * C2p) * np.sin(dhp / 2.0)

    L_bar = 0.5 * (L1 + L2)
    Cp_bar = 0.5 * (C1p + C2p)

    hsum = h1p + h2p
    habs = np.abs(h1p - h2p)
    h_bar = np.where(
        zero_chroma,
        hsum,
        np.where(
            habs <= np.pi,
            0.5 * hsum,
            np.where(hsum < 2 * np.pi, 0.5 * hsum + np.pi, 0.5 * hsum - np.pi),
        ),
    )

    T = (
        1.0
        - 0.17 * np.cos(h_bar - np.pi / 6.0)
        + 0.24 * np.cos(2.0 * h_bar)
        + 0.32 * np.cos(3.0 * h_bar + np.pi / 30.0)
        - 0.20 * np.cos(4.0 * h_bar - 63.0 * np.pi / 180.0)
    )

    h_bar_deg = np.degrees(h_bar) % 360.0
    d_theta = (np.pi / 6.0) * np.exp(-(((h_bar_deg - 275.0) / 25.0) ** 2))

    cp7 = Cp_bar**7
    R_C = 2.0 * np.sqrt(cp7 / (cp7 + _POW7_25))
    Lm50sq = (L_bar - 50.0) ** 2
    S_L = 1.0 + 0.015 * Lm50sq / np.sqrt(20.0 + Lm50sq)
    S_C = 1.0 + 0.045 * Cp_bar
    S_H = 1.0 + 0.015 * Cp_bar * T
    R_T = -np.sin(2.0 * d_theta) * R_C

    fL = dLp / (kL * S_L)
    fC = dCp / (kC * S_C)
    fH = dHp / (kH * S_H)
    out = np.sqrt(fL**2 + fC**2 + fH**2 + R_T * fC * fH)
    return float(out) if scalar else out


def gamut_clip_array(lab, chroma_tol: float = 0.1, tol: float = 1e-6) -> np.ndarray:
    """Project out-of-gamut colors back into sRGB by shrinking chroma only.

    L and hue angle are held fixed; chroma is reduced by bisection until the
    color is in gamut, resolved to within ``chroma_tol`` chroma units.
    """
    lab = np.atleast_2d(np.asarray(lab, dtype=float)).copy()
    # The neutral axis is only displayable for L inside [0, 100].
    lab[:, 0] = np.clip(lab[:, 0], 0.0, 100.0)
    bad = ~in_gamut_array(lab, tol=tol)
    if np.any(bad):
        sub = lab[bad]
        lo = np.zeros(len(sub))
        hi = np.ones(len(sub))
        # Resolve the chroma scale to within chroma_tol of the gamut boundary.
        chroma = np.hypot(sub[:, 1], sub[:, 2])
        max_c = max(float(chroma.max()), 1.0)
        steps = int(np.ceil(np.log2(max_c / chroma_tol))) + 1
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            trial = sub.copy()
            trial[:, 1] *= mid
            trial[:, 2] *= mid
            ok = in_gamut_array(trial, tol=tol)
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        sub[:, 1] *= lo
        sub[:, 2] *= lo
        lab[bad] = sub
    return lab


def gamut_clip(c: LabColor, chroma_tol: float = 0.1) -> LabColor:
    if in_gamut(c):
        return c
    return LabColor.from_array(gamut_clip_array(c.to_array(), chroma_tol=chroma_tol)[0])


def parse_hex(s: str) -> RgbColor:
    """Parse ``#RRGGBB`` (case-insensitive, leading ``#`` optional)."""
    t = s.strip().lstrip("#")
    if len(t) != 6 or any(ch not in "0123456789abcdefABCDEF" for ch in t):
        raise ValueError(f"invalid hex color: {s!r}")
    return RgbColor(int(t[0:2], 16) / 255.0, int(t[2:4], 16) / 255.0, int(t[4:6], 16) / 255.0)


def format_hex(rgb: RgbColor) -> str:
    vals = np.clip(np.round(rgb.to_array() * 255.0), 0, 255).astype(int)
    return "#{:02X}{:02X}{:02X}".format(*vals)


def hex_to_lab(s: str) -> LabColor:
    return srgb_to_lab(parse_hex(s))


def lab_to_hex(c: LabColor) -> str:
    rgb = lab_to_srgb(c, clamp=True)
    return format_hex(rgb)
