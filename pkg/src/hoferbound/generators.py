"""Floer generators of the radial Hamiltonian f_a: chords matched to geodesics.

A generator is a pair (radius r, geodesic g) with |f_a'(r)| equal to the
length of g.  Its grading comes from the Morse index of g and the signs of
f_a' and f_a''; its action is f_a(r) - r f_a'(r).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex import Generator
from .errors import BadParameters, DuplicateAction
from .geometry import GeodesicDatum, HomotopyClass, check_assumption, enumerate_geodesics, submanifold_dimension
from .profile import Profile, critical_radii_many, evaluate

__all__ = ["FloerGenerator", "GeneratorSet", "grading", "action", "enumerate_generators"]

ACTION_TOL = 1e-9


def grading(d: int, n: int, morse: int, sign_fprime: int, sign_fsecond: int) -> int:
    """Floer grading of a chord; four cases by the signs of f' and f''."""
    if not 0 <= d < n:
        raise BadParameters("need 0 <= d < n")
    if morse < 0:
        raise BadParameters("Morse index must be nonnegative")
    if sign_fprime not in (1, -1) or sign_fsecond not in (1, -1):
        raise BadParameters("signs must be +1 or -1")
    if sign_fprime > 0:
        return d - morse if sign_fsecond > 0 else d + 1 - morse
    return n - 1 + morse if sign_fsecond > 0 else n + morse


def action(p: Profile, r):
    """f_a(r) - r f_a'(r)."""
    r_arr = np.asarray(r, dtype=float)
    out = evaluate(p, r_arr, 0) - r_arr * evaluate(p, r_arr, 1)
    return float(out) if np.ndim(r) == 0 else out


@dataclass(frozen=True)
class FloerGenerator:
    id: str
    r: float
    tau: float
    sign_fsecond: int
    grading: int
    action: float
    band: int
    geodesic: GeodesicDatum = field(repr=False)

    @property
    def morse(self) -> int:
        return self.geodesic.morse_index

    @property
    def homotopy_class(self) -> HomotopyClass:
        return self.geodesic.homotopy_class

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "r": self.r,
            "tau": self.tau,
            "sign_fsecond": self.sign_fsecond,
            "morse": self.morse,
            "grading": self.grading,
            "action": self.action,
            "band": self.band,
            "length": self.geodesic.length,
            "class": self.homotopy_class.to_json(),
        }


@dataclass(frozen=True)
class GeneratorSet:
    n: int
    d: int
    length_cap: float
    generators: tuple[FloerGenerator, ...]

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def for_complex(self) -> list[Generator]:
        return [Generator(g.id, g.grading, g.action) for g in self.generators]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "length_cap": self.length_cap,
            "generators": [g.to_json() for g in self.generators],
        }


def enumerate_generators(m, q, x1, c, p: Profile, k: int | None = None) -> GeneratorSet:
    """Every generator in class ``c`` for the profile ``p``.

    Geodesics up to the strict cap ``p.max_slope`` are matched against the
    critical radii of ``p``.  When ``k`` is given the index assumption is
    checked first and its failure propagates.
    """
    n = m.dimension
    d = submanifold_dimension(m, q)
    cap = p.max_slope
    if cap == 0.0:
        return GeneratorSet(n, d, 0.0, ())
    if k is not None:
        check_assumption(m, q, x1, c, k, cap)
    geos = [g for g in enumerate_geodesics(m, q, x1, c, cap) if g.length < cap]
    if not geos:
        return GeneratorSet(n, d, cap, ())
    roots = critical_radii_many(p, [g.length for g in geos])
    raw = []
    for g, rs in zip(geos, roots):
        for cr in rs:
            raw.append((cr, g))
    if not raw:
        return GeneratorSet(n, d, cap, ())
    acts = action(p, np.array([cr.r for cr, _ in raw]))
    rows = []
    for (cr, g), act in zip(raw, np.atleast_1d(acts)):
        mu = grading(d, n, g.morse_index, cr.sign_fprime, cr.sign_fsecond)
        rows.append((mu, float(act), cr, g))
    by_action = sorted(rows, key=lambda t: t[1])
    for (_, a1, _, g1), (_, a2, _, g2) in zip(by_action, by_action[1:]):
        if a2 - a1 <= ACTION_TOL:
            raise DuplicateAction(f"actions {a1!r} and {a2!r} coincide within tolerance")
    rows.sort(key=lambda t: (t[0], t[1]))
    gens = tuple(
        FloerGenerator(
            id=f"g{i}",
            r=cr.r,
            tau=cr.sign_fprime * g.length,
            sign_fsecond=cr.sign_fsecond,
            grading=mu,
            action=act,
            band=cr.band,
            geodesic=g,
        )
        for i, (mu, act, cr, g) in enumerate(rows)
    )
    return GeneratorSet(n, d, cap, gens)
