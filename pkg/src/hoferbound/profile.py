"""Bump function, dyadic profiles f_a and their critical radii.

The bump ``h`` lives on ``[0, R]``.  It vanishes outside ``[delta, R - delta]``,
peaks at ``h(R/2) = 1`` and has second derivative positive on
``(delta, R/4)`` and ``(3R/4, R - delta)`` and negative on ``(R/4, 3R/4)``.  We
realize it as a C^2 piecewise polynomial whose second derivative is a
parabola on each of the three active pieces, so ``h'`` is monotone on each
of them and all roots of ``h' = t`` can be bracketed exactly.

A profile is ``f_a(s) = sum_i a_i h(2^(i+1) s - R)``; coordinate ``a_i``
controls the dyadic band ``[2^-(i+1) R, 2^-i R]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import Polynomial

from .errors import BadParameters, TransversalityViolation

__all__ = [
    "BumpProfile",
    "SparseCoefficients",
    "Profile",
    "CriticalRadius",
    "make_bump",
    "make_profile",
    "evaluate",
    "critical_radii",
    "critical_radii_many",
    "osc",
    "sup_norm",
    "hofer_bounds",
    "profile_samples",
]

ROOT_RTOL = 1e-12
ROOT_MAX_ITER = 200
TRANSVERSALITY_TOL = 1e-9


@dataclass(frozen=True)
class BumpProfile:
    R: float
    delta: float
    # (left, right, poly in s - left) for the three active pieces and
    # the middle piece split at R/2 so the breakpoint set is explicit
    pieces: tuple = field(repr=False)
    slope_max: float = field(repr=False)
    slope_min: float = field(repr=False)
    curvature_max: float = field(repr=False)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        R, d = self.R, self.delta
        return (d, R / 4, R / 2, 3 * R / 4, R - d)

    def __call__(self, s, order: int = 0):
        return _bump_eval(self, s, order)


def make_bump(R: float, delta: float) -> BumpProfile:
    """Build the bump for support parameter ``R`` and margin ``delta``."""
    R = float(R)
    delta = float(delta)
    if not (R > 0 and 0 < delta < R / 4):
        raise BadParameters(f"need R > 0 and 0 < delta < R/4, got R={R}, delta={delta}")
    a = R / 4 - delta
    b = R / 4
    # h'' = c1 u (a - u) on the rising piece, -c2 v (2b - v) across the top;
    # h'(R/2) = 0 and h(R/2) = 1 fix both constants
    c1 = 1.0 / (a**3 * (a / 12 + 5 * b / 48))
    c2 = c1 * a**3 / (4 * b**3)

    rise = Polynomial([0, 0, 0, c1 * a / 6, -c1 / 12])
    h_a, dh_a = c1 * a**4 / 12, c1 * a**3 / 6
    top = Polynomial([h_a, dh_a, 0, -c2 * b / 3, c2 / 12])
    # mirror images, written in the local coordinate of each piece
    top_right = top(Polynomial([b, 1]))
    fall = rise(Polynomial([a, -1]))
    pieces = (
        (delta, R / 4, rise),
        (R / 4, R / 2, top),
        (R / 2, 3 * R / 4, top_right),
        (3 * R / 4, R - delta, fall),
    )
    return BumpProfile(
        R=R,
        delta=delta,
        pieces=pieces,
        slope_max=dh_a,
        slope_min=-dh_a,
        curvature_max=max(c1 * a * a / 4, c2 * b * b),
    )


def _bump_eval(bump: BumpProfile, s, order: int):
    s_arr = np.asarray(s, dtype=float)
    out = np.zeros_like(s_arr)
    for left, right, poly in bump.pieces:
        mask = (s_arr >= left) & (s_arr <= right)
        if np.any(mask):
            q = poly.deriv(order) if order else poly
            out[mask] = q(s_arr[mask] - left)
    if np.ndim(s) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SparseCoefficients:
    """Finitely supported real sequence; only nonzero entries are stored."""

    entries: tuple[tuple[int, float], ...] = ()

    @classmethod
    def from_any(cls, data) -> "SparseCoefficients":
        if isinstance(data, SparseCoefficients):
            return data
        if isinstance(data, Mapping):
            items = ((int(k), float(v)) for k, v in data.items())
        else:
            items = ((i, float(v)) for i, v in enumerate(data))
        clean = {}
        for i, v in items:
            if i < 0:
                raise BadParameters(f"negative coefficient index {i}")
            if not math.isfinite(v):
                raise BadParameters(f"non-finite coefficient at index {i}")
            if v != 0.0:
                clean[i] = v
        return cls(tuple(sorted(clean.items())))

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def dense(self) -> list[float]:
        if not self.entries:
            return []
        top = self.entries[-1][0]
        d = self.as_dict()
        return [d.get(i, 0.0) for i in range(top + 1)]

    def values(self) -> list[float]:
        return [v for _, v in self.entries]

    def __add__(self, other: "SparseCoefficients") -> "SparseCoefficients":
        d = self.as_dict()
        for i, v in other.entries:
            d[i] = d.get(i, 0.0) + v
        return SparseCoefficients.from_any(d)

    def __sub__(self, other: "SparseCoefficients") -> "SparseCoefficients":
        return self + other.scaled(-1.0)

    def scaled(self, m: float) -> "SparseCoefficients":
        return SparseCoefficients.from_any({i: m * v for i, v in self.entries})


@dataclass(frozen=True)
class Profile:
    bump: BumpProfile
    coeffs: SparseCoefficients

    @property
    def R(self) -> float:
        return self.bump.R

    @property
    def max_slope(self) -> float:
        if not self.coeffs.entries:
            return 0.0
        return max(2.0 ** (i + 1) * abs(v) for i, v in self.coeffs.entries) * self.bump.slope_max


def make_profile(bump: BumpProfile, coeffs) -> Profile:
    return Profile(bump, SparseCoefficients.from_any(coeffs))


def evaluate(p: Profile, s, order: int = 0):
    """f_a, f_a' or f_a'' at ``s`` (scalar or array)."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    s_arr = np.asarray(s, dtype=float)
    out = np.zeros_like(s_arr)
    R = p.bump.R
    for i, a in p.coeffs.entries:
        scale = 2.0 ** (i + 1)
        u = scale * s_arr - R
        mask = (u >= 0) & (u <= R)
        if np.any(mask):
            out[mask] += a * scale**order * _bump_eval(p.bump, u[mask], order)
    if np.ndim(s) == 0:
        return float(out)
    return out


def osc(a) -> float:
    vals = SparseCoefficients.from_any(a).values()
    return max([0.0, *vals]) - min([0.0, *vals])


def sup_norm(a) -> float:
    vals = SparseCoefficients.from_any(a).values()
    return max([0.0, *(abs(v) for v in vals)])


def hofer_bounds(p: Profile) -> float:
    """max f_a - min f_a, read off the piecewise extrema of f_a."""
    # f_a vanishes between the bands; inside band i the only interior
    # critical point of the bump sits at u = R/2
    peaks = [0.75 * 2.0**-i * p.R for i, _ in p.coeffs.entries]
    values = [0.0, *(evaluate(p, s) for s in peaks)]
    return max(values) - min(values)


@dataclass(frozen=True)
class CriticalRadius:
    r: float
    sign_fprime: int
    sign_fsecond: int
    band: int


def _monotone_pieces(bump: BumpProfile):
    """Pieces of [0, R] on which h' is strictly monotone, with end values."""
    R, d = bump.R, bump.delta
    hi, lo = bump.slope_max, bump.slope_min
    return (
        (d, R / 4, 0.0, hi),
        (R / 4, 3 * R / 4, hi, lo),
        (3 * R / 4, R - d, lo, 0.0),
    )


def _bisect(bump: BumpProfile, left: float, right: float, increasing: bool, targets: np.ndarray) -> np.ndarray:
    lo = np.full(targets.shape, left)
    hi = np.full(targets.shape, right)
    R = bump.R
    for _ in range(ROOT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        val = _bump_eval(bump, mid, 1)
        below = (val < targets) if increasing else (val > targets)
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        # relative to u + R, which is proportional to the radius r
        if np.all(hi - lo <= ROOT_RTOL * (0.5 * (lo + hi) + R)):
            break
    return 0.5 * (lo + hi)


def critical_radii_many(p: Profile, lengths) -> list[list[CriticalRadius]]:
    """Critical radii for each length in ``lengths`` (vectorized bisection)."""
    lengths = np.asarray(lengths, dtype=float).reshape(-1)
    if np.any(lengths <= 0):
        raise ValueError("lengths must be positive")
    out: list[list[CriticalRadius]] = [[] for _ in range(lengths.size)]
    bump = p.bump
    R = bump.R
    extremes = (bump.slope_max, bump.slope_min)
    for i, a in p.coeffs.entries:
        scale = 2.0 ** (i + 1)
        k = a * scale
        curv_scale = abs(a) * scale * scale * bump.curvature_max
        for sign in (1, -1):
            t = sign * lengths / k
            # a target touching an extremum of h' is a root at an h'' zero
            for ext in extremes:
                touch = np.abs(t - ext) <= ROOT_RTOL * abs(ext)
                if np.any(touch):
                    ell = float(lengths[np.argmax(touch)])
                    raise TransversalityViolation(
                        f"length {ell!r} equals the extremal slope of band {i}"
                    )
            for left, right, v0, v1 in _monotone_pieces(bump):
                lo_v, hi_v = min(v0, v1), max(v0, v1)
                mask = (t > lo_v) & (t < hi_v)
                if not np.any(mask):
                    continue
                idx = np.nonzero(mask)[0]
                u = _bisect(bump, left, right, v1 > v0, t[idx])
                r = (u + R) / scale
                fpp = a * scale * scale * _bump_eval(bump, u, 2)
                for j, rr, uu, ff in zip(idx, r, u, np.atleast_1d(fpp)):
                    if abs(ff) <= TRANSVERSALITY_TOL * curv_scale:
                        raise TransversalityViolation(
                            f"f'' vanishes at matched radius r={rr!r} (band {i}, length {lengths[j]!r})"
                        )
                    out[j].append(CriticalRadius(float(rr), sign, 1 if ff > 0 else -1, i))
    for lst in out:
        lst.sort(key=lambda c: c.r)
    return out


def critical_radii(p: Profile, ell: float) -> list[CriticalRadius]:
    """All radii r with |f_a'(r)| = ell, with the signs of f_a' and f_a''."""
    if not ell > 0:
        raise ValueError("ell must be positive")
    return critical_radii_many(p, [ell])[0]


def profile_samples(p: Profile, resolution: int) -> np.ndarray:
    """Array of rows (s, f, f', f'') on a uniform grid of [0, R]."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    s = np.linspace(0.0, p.R, resolution)
    return np.column_stack([s, evaluate(p, s, 0), evaluate(p, s, 1), evaluate(p, s, 2)])


def coefficients_from(values: Iterable[float] | Mapping[int, float]) -> SparseCoefficients:
    return SparseCoefficients.from_any(values)
