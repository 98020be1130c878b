"""Closed-form geodesics from a submanifold Q to a point x1.

Supported families are flat tori, round spheres and their products.  For
every family the geodesics perpendicular to Q and ending at x1 are known in
closed form, as are their focal points, so enumeration below a length cap is
provably complete.  ``jacobi_oracle`` recomputes Morse indices by integrating
the Jacobi equation and serves as an independent check of the closed forms.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import (
    AssumptionViolated,
    BadParameters,
    CapTooSmall,
    FocalPointEndpoint,
    NonConvergence,
    UnsupportedFamily,
)

__all__ = [
    "FlatTorus",
    "RoundSphere",
    "Product",
    "SinglePoint",
    "Subtorus",
    "GreatSubsphere",
    "ProductOf",
    "TorusClass",
    "SphereClass",
    "ProductClass",
    "Leg",
    "GeodesicDatum",
    "AssumptionReport",
    "whole",
    "make_class",
    "trivial_class",
    "submanifold_dimension",
    "shape_operator",
    "is_focal_point",
    "is_in_submanifold",
    "enumerate_geodesics",
    "morse_index",
    "jacobi_oracle",
    "check_assumption",
    "FAMILY_METADATA",
]

FOCAL_RTOL = 1e-9
POINT_TOL = 1e-9


# -- manifolds ---------------------------------------------------------------


@dataclass(frozen=True)
class FlatTorus:
    """R^n modulo the lattice spanned by the rows of ``lattice``."""

    lattice: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        B = np.asarray(self.lattice, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
            raise BadParameters("lattice must be a square list of n basis vectors")
        if abs(np.linalg.det(B)) < 1e-12:
            raise BadParameters("lattice basis is degenerate")

    @classmethod
    def standard(cls, n: int) -> "FlatTorus":
        return cls(tuple(tuple(float(i == j) for j in range(n)) for i in range(n)))

    @property
    def dimension(self) -> int:
        return len(self.lattice)


@dataclass(frozen=True)
class RoundSphere:
    """Sphere of radius ``radius`` in R^(n+1); points are given as vectors in R^(n+1)."""

    dimension: int
    radius: float = 1.0

    def __post_init__(self):
        if self.dimension < 2:
            raise BadParameters("sphere dimension must be at least 2")
        if not self.radius > 0:
            raise BadParameters("sphere radius must be positive")


@dataclass(frozen=True)
class Product:
    left: "Manifold"
    right: "Manifold"

    @property
    def dimension(self) -> int:
        return self.left.dimension + self.right.dimension


Manifold = Union[FlatTorus, RoundSphere, Product]


# -- submanifolds --------------------------------------------------------------


@dataclass(frozen=True)
class SinglePoint:
    coordinates: tuple[float, ...]


@dataclass(frozen=True)
class Subtorus:
    """Image of ``offset + span(directions)``; directions are integer lattice coefficients."""

    directions: tuple[tuple[int, ...], ...]
    offset: tuple[float, ...]


@dataclass(frozen=True)
class GreatSubsphere:
    """Intersection of the sphere with the linear span of ``basis`` (dimension d + 1)."""

    basis: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class ProductOf:
    left: "Submanifold"
    right: "Submanifold"


Submanifold = Union[SinglePoint, Subtorus, GreatSubsphere, ProductOf]


def whole(m: Manifold) -> Submanifold:
    """The submanifold equal to all of ``m``."""
    if isinstance(m, FlatTorus):
        n = m.dimension
        return Subtorus(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (0.0,) * n)
    if isinstance(m, RoundSphere):
        n = m.dimension + 1
        return GreatSubsphere(tuple(tuple(float(i == j) for j in range(n)) for i in range(n)))
    if isinstance(m, Product):
        return ProductOf(whole(m.left), whole(m.right))
    raise UnsupportedFamily(f"unknown manifold {m!r}")


def _rref(rows: Sequence[Sequence[int]], n: int) -> tuple[list[list[Fraction]], list[int]]:
    mat = [[Fraction(int(x)) for x in row] for row in rows]
    for row in mat:
        if len(row) != n:
            raise BadParameters("subtorus direction has wrong length")
    pivots: list[int] = []
    r = 0
    for col in range(n):
        pick = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pick is None:
            continue
        mat[r], mat[pick] = mat[pick], mat[r]
        pv = mat[r][col]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    return mat[:r], pivots


def _orthonormal_rows(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as rows) of the row span of ``vectors``."""
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[-1] if vectors.ndim == 2 else 0))
    u, s, vt = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[:rank]


def _complete_basis(ambient: np.ndarray, partial: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the complement of ``partial`` inside ``ambient``."""
    if partial.shape[0] == 0:
        return ambient
    proj = ambient - (ambient @ partial.T) @ partial
    return _orthonormal_rows(proj)


def submanifold_dimension(m: Manifold, q: Submanifold) -> int:
    _validate(m, q)
    if isinstance(q, SinglePoint):
        return 0
    if isinstance(q, Subtorus):
        return len(_rref(q.directions, m.dimension)[0])
    if isinstance(q, GreatSubsphere):
        return _orthonormal_rows(np.asarray(q.basis, dtype=float)).shape[0] - 1
    return submanifold_dimension(m.left, q.left) + submanifold_dimension(m.right, q.right)


def _validate(m: Manifold, q: Submanifold) -> None:
    if isinstance(m, Product):
        if not isinstance(q, ProductOf):
            raise UnsupportedFamily("a product manifold needs a product submanifold")
        _validate(m.left, q.left)
        _validate(m.right, q.right)
        return
    if isinstance(q, SinglePoint):
        want = m.dimension + (1 if isinstance(m, RoundSphere) else 0)
        if len(q.coordinates) != want:
            raise BadParameters(f"point needs {want} coordinates")
        return
    if isinstance(m, FlatTorus) and isinstance(q, Subtorus):
        if len(q.offset) != m.dimension:
            raise BadParameters("subtorus offset has wrong length")
        if not q.directions:
            raise BadParameters("subtorus needs at least one direction; use a point instead")
        _rref(q.directions, m.dimension)
        return
    if isinstance(m, RoundSphere) and isinstance(q, GreatSubsphere):
        B = np.asarray(q.basis, dtype=float)
        if B.ndim != 2 or B.shape[1] != m.dimension + 1:
            raise BadParameters("great subsphere basis vectors need n + 1 coordinates")
        if _orthonormal_rows(B).shape[0] < 2:
            raise UnsupportedFamily("great subsphere needs a span of dimension at least 2")
        return
    raise UnsupportedFamily(f"{type(q).__name__} is not supported inside {type(m).__name__}")


def shape_operator(m: Manifold, q: Submanifold, x=None, p=None) -> np.ndarray:
    """Second fundamental form of Q along the conormal ``p`` (zero for the whole catalog)."""
    d = submanifold_dimension(m, q)
    return np.zeros((d, d))


# -- homotopy classes ----------------------------------------------------------


@dataclass(frozen=True)
class TorusClass:
    """Integer translate modulo the direction lattice of Q.

    ``key`` is the canonical reduced form and is the only field used for
    equality; ``translate`` is a representative kept for enumeration.
    """

    key: tuple[Fraction, ...]
    translate: tuple[int, ...] = field(compare=False)

    def to_json(self):
        return list(self.translate)


@dataclass(frozen=True)
class SphereClass:
    def to_json(self):
        return None


@dataclass(frozen=True)
class ProductClass:
    left: "HomotopyClass"
    right: "HomotopyClass"

    def to_json(self):
        return {"left": self.left.to_json(), "right": self.right.to_json()}


HomotopyClass = Union[TorusClass, SphereClass, ProductClass]


def _torus_class(m: FlatTorus, q: Submanifold, k: Sequence[int]) -> TorusClass:
    n = m.dimension
    k = tuple(int(v) for v in k)
    if len(k) != n:
        raise BadParameters(f"torus class needs {n} integers")
    if isinstance(q, SinglePoint):
        return TorusClass(tuple(Fraction(v) for v in k), k)
    rows, pivots = _rref(q.directions, n)
    red = [Fraction(v) for v in k]
    for row, pc in zip(rows, pivots):
        f = red[pc]
        if f:
            red = [x - f * y for x, y in zip(red, row)]
    return TorusClass(tuple(red), k)


def make_class(m: Manifold, q: Submanifold, spec, x=None) -> HomotopyClass:
    """Canonical class from a JSON-style description.

    Tori take a list of integers, spheres take ``None``, products take a pair or a
    ``{"left", "right"}`` mapping.  The string ``"trivial"`` selects the class of
    the constant path and needs the endpoint ``x``.
    """
    if spec == "trivial":
        return trivial_class(m, q, x)
    if isinstance(m, FlatTorus):
        if spec is None:
            spec = (0,) * m.dimension
        return _torus_class(m, q, spec)
    if isinstance(m, RoundSphere):
        if spec not in (None, "unit", [], ()):
            raise BadParameters("spheres have a single homotopy class")
        return SphereClass()
    if isinstance(m, Product):
        if spec is None:
            spec = (None, None)
        if isinstance(spec, dict):
            spec = (spec.get("left"), spec.get("right"))
        xl, xr = (x if x is not None else (None, None))
        return ProductClass(make_class(m.left, q.left, spec[0], xl), make_class(m.right, q.right, spec[1], xr))
    raise UnsupportedFamily(f"unknown manifold {m!r}")


def trivial_class(m: Manifold, q: Submanifold, x) -> HomotopyClass:
    """Class of the constant path at ``x``; requires ``x`` to lie on Q."""
    if x is None:
        raise BadParameters("the trivial class needs the endpoint")
    if isinstance(m, Product):
        return ProductClass(trivial_class(m.left, q.left, x[0]), trivial_class(m.right, q.right, x[1]))
    if isinstance(m, RoundSphere):
        return SphereClass()
    k, dist = _torus_nearest(m, q, x)
    if dist > POINT_TOL:
        raise BadParameters("trivial class requested but the endpoint is not on Q")
    return _torus_class(m, q, k)


# -- legs: one factor's share of a geodesic ---------------------------------------


@dataclass(frozen=True)
class Leg:
    """The component of a geodesic in one irreducible factor.

    Vectors are in the factor's ambient coordinates (R^n for a torus lift,
    R^(n+1) for a sphere).  ``tangent_q`` is an orthonormal basis of T Q at the
    start point.
    """

    family: str
    dimension: int
    radius: float
    q_dim: int
    q_kind: str
    length: float
    start: tuple[float, ...]
    direction: tuple[float, ...]
    tangent_q: tuple[tuple[float, ...], ...]

    @property
    def angle(self) -> float:
        return self.length / self.radius if self.family == "sphere" else 0.0


def _leg_focal_angles(leg: Leg, upto: float):
    """Focal angles (angle, multiplicity) with angle <= upto, closed form."""
    if leg.family != "sphere":
        return []
    n, d = leg.dimension, leg.q_dim
    out = []
    if leg.q_kind == "point":
        m = 1
        while m * math.pi <= upto:
            out.append((m * math.pi, n - 1))
            m += 1
        return out
    # totally geodesic great subsphere: tangential fields cos, normal fields sin
    m = 0
    while m * math.pi + math.pi / 2 <= upto:
        out.append((m * math.pi + math.pi / 2, d))
        m += 1
    if n - 1 - d > 0:
        m = 1
        while m * math.pi <= upto:
            out.append((m * math.pi, n - 1 - d))
            m += 1
    out.sort()
    return out


def _leg_index(leg: Leg) -> int:
    """Closed-form count of focal points strictly inside the leg."""
    theta = leg.angle
    if theta == 0.0:
        return 0
    n, d = leg.dimension, leg.q_dim

    def below(offset: float) -> int:
        # number of integers m >= 0 with offset + m pi < theta; endpoint hits are errors
        x = (theta - offset) / math.pi
        if x <= 0:
            return 0
        m = math.ceil(x)
        if abs(x - round(x)) * math.pi <= FOCAL_RTOL * theta and round(x) > 0:
            raise FocalPointEndpoint(f"endpoint is focal along a geodesic of length {leg.length!r}")
        return m

    if leg.q_kind == "point":
        return (n - 1) * below(math.pi)
    return d * below(math.pi / 2) + (n - 1 - d) * below(math.pi)


def _leg_focal_times(leg: Leg) -> list[tuple[float, int]]:
    theta = leg.angle
    if theta == 0.0:
        return []
    times = []
    for ang, mult in _leg_focal_angles(leg, theta * (1 + FOCAL_RTOL)):
        if abs(ang - theta) <= FOCAL_RTOL * theta:
            raise FocalPointEndpoint(f"endpoint is focal along a geodesic of length {leg.length!r}")
        times.append((ang / theta, mult))
    return times


@dataclass(frozen=True)
class GeodesicDatum:
    length: float
    morse_index: int
    homotopy_class: HomotopyClass
    initial_covector: tuple[float, ...]
    legs: tuple[Leg, ...] = field(repr=False)

    @functools.cached_property
    def focal_times(self) -> tuple[tuple[float, int], ...]:
        """Focal times in (0, 1) with multiplicities, merged across factors."""
        return _merge_focal(self.legs)

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "morse_index": self.morse_index,
            "class": self.homotopy_class.to_json(),
            "focal_times": [[t, k] for t, k in self.focal_times],
        }


def _merge_focal(legs: Sequence[Leg]) -> tuple[tuple[float, int], ...]:
    merged: list[list] = []
    for t, k in sorted(itertools.chain.from_iterable(_leg_focal_times(g) for g in legs)):
        if merged and abs(merged[-1][0] - t) <= FOCAL_RTOL:
            merged[-1][1] += k
        else:
            merged.append([t, k])
    return tuple((t, k) for t, k in merged)


def morse_index(g: GeodesicDatum, q: Submanifold | None = None) -> int:
    """Number of focal points in (0, 1), with multiplicity, from the closed forms."""
    return sum(_leg_index(leg) for leg in g.legs)


# -- flat torus ------------------------------------------------------------------


def _torus_frame(m: FlatTorus, q: Submanifold):
    B = np.asarray(m.lattice, dtype=float)
    if isinstance(q, SinglePoint):
        return B, np.asarray(q.coordinates, dtype=float), np.zeros((0, m.dimension)), "point"
    W = np.asarray(q.directions, dtype=float) @ B
    return B, np.asarray(q.offset, dtype=float), _orthonormal_rows(W), "subtorus"


def _torus_perp(m: FlatTorus, q: Submanifold, x, k) -> tuple[np.ndarray, np.ndarray]:
    B, base, U, _ = _torus_frame(m, q)
    y = np.asarray(x, dtype=float) + np.asarray(k, dtype=float) @ B
    rel = y - base
    foot = base + (rel @ U.T) @ U
    return foot, y - foot


def _torus_nearest(m: FlatTorus, q: Submanifold, x) -> tuple[tuple[int, ...], float]:
    """Translate realizing the distance from x to Q, searched near the rounded lift."""
    B, base, U, _ = _torus_frame(m, q)
    coeff = (np.asarray(x, dtype=float) - base) @ np.linalg.inv(B)
    centre = -np.round(coeff).astype(int)
    best = (tuple(centre), math.inf)
    for shift in itertools.product((-1, 0, 1), repeat=m.dimension):
        k = centre + np.asarray(shift)
        _, v = _torus_perp(m, q, x, k)
        dist = float(np.linalg.norm(v))
        if dist < best[1] - 1e-15:
            best = (tuple(int(t) for t in k), dist)
    return best


def _torus_legs(m: FlatTorus, q: Submanifold, x, cls: TorusClass) -> list[Leg]:
    foot, v = _torus_perp(m, q, x, cls.translate)
    _, _, U, kind = _torus_frame(m, q)
    length = float(np.linalg.norm(v))
    scale = max(1.0, float(np.linalg.norm(foot)))
    if length <= POINT_TOL * scale:
        length, direction = 0.0, np.zeros(m.dimension)
    else:
        direction = v / length
    return [
        Leg(
            family="flat",
            dimension=m.dimension,
            radius=0.0,
            q_dim=U.shape[0],
            q_kind=kind,
            length=length,
            start=tuple(foot.tolist()),
            direction=tuple(direction.tolist()),
            tangent_q=tuple(tuple(r) for r in U.tolist()),
        )
    ]


# -- round sphere ------------------------------------------------------------------


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise BadParameters("sphere point must be a nonzero vector")
    return v / nv


def _sphere_subspace(m: RoundSphere, q: Submanifold) -> np.ndarray:
    if isinstance(q, SinglePoint):
        return _unit(q.coordinates)[None, :]
    return _orthonormal_rows(np.asarray(q.basis, dtype=float))


def _sphere_split(m: RoundSphere, q: Submanifold, x):
    """(unit x, projection onto span Q, normal part)."""
    u = _unit(x)
    V = _sphere_subspace(m, q)
    pv = (u @ V.T) @ V
    return u, pv, u - pv


def _sphere_legs(m: RoundSphere, q: Submanifold, x, cap: float) -> list[Leg]:
    n, rho = m.dimension, m.radius
    u, pv, pp = _sphere_split(m, q, x)
    npv, npp = float(np.linalg.norm(pv)), float(np.linalg.norm(pp))
    V = _sphere_subspace(m, q)
    kind = "point" if isinstance(q, SinglePoint) else "subsphere"
    d = V.shape[0] - 1 if kind == "subsphere" else 0
    legs: list[Leg] = []

    def add(start: np.ndarray, direction: np.ndarray, angle: float):
        if rho * angle > cap:
            return False
        if kind == "point":
            tq = np.zeros((0, n + 1))
        else:
            tq = _complete_basis(V, start[None, :])
        legs.append(
            Leg("sphere", n, rho, d, kind, rho * angle, tuple((rho * start).tolist()),
                tuple(direction.tolist()), tuple(tuple(r) for r in tq.tolist()))
        )
        return True

    if kind == "subsphere" and d == n:
        # Q is the whole sphere: only the constant path
        legs.append(Leg("sphere", n, rho, d, kind, 0.0, tuple((rho * u).tolist()),
                        (0.0,) * (n + 1), tuple(tuple(r) for r in _complete_basis(V, u[None, :]).tolist())))
        return legs
    if npp <= POINT_TOL:
        raise FocalPointEndpoint("endpoint lies on a proper submanifold of a sphere factor; normal geodesics form a continuum")
    if kind == "point":
        x0 = V[0]
        delta = math.atan2(npp, npv if (u @ x0) >= 0 else -npv)
        if math.pi - delta <= FOCAL_RTOL * math.pi:
            raise FocalPointEndpoint("endpoint is antipodal to the point")
        w = pp / npp
        families = [(x0, w, delta), (x0, -w, 2 * math.pi - delta)]
    else:
        if npv <= POINT_TOL:
            raise FocalPointEndpoint("endpoint is a pole of the great subsphere")
        qv, w = pv / npv, pp / npp
        alpha = math.atan2(npp, npv)
        families = [
            (qv, w, alpha),
            (qv, -w, 2 * math.pi - alpha),
            (-qv, -w, math.pi + alpha),
            (-qv, w, math.pi - alpha),
        ]
    for start, direction, base in families:
        j = 0
        while add(start, direction, base + 2 * math.pi * j):
            j += 1
    legs.sort(key=lambda g: g.length)
    return legs


# -- products and enumeration -------------------------------------------------------


def _leaves(m: Manifold, q: Submanifold, x, c: HomotopyClass):
    if isinstance(m, Product):
        if not isinstance(c, ProductClass):
            raise BadParameters("product manifold needs a product class")
        return _leaves(m.left, q.left, x[0], c.left) + _leaves(m.right, q.right, x[1], c.right)
    return [(m, q, x, c)]


def _leaf_legs(m, q, x, c, cap: float) -> list[Leg]:
    if isinstance(m, FlatTorus):
        if not isinstance(c, TorusClass):
            raise BadParameters("torus factor needs an integer translate class")
        legs = _torus_legs(m, q, x, c)
        return [g for g in legs if g.length <= cap]
    if isinstance(m, RoundSphere):
        return _sphere_legs(m, q, x, cap)
    raise UnsupportedFamily(f"unknown manifold {m!r}")


def _assemble(legs: Sequence[Leg], c: HomotopyClass) -> GeodesicDatum:
    length = math.sqrt(sum(g.length**2 for g in legs))
    cov = []
    for g in legs:
        w = g.length / length if length > 0 else 0.0
        cov.extend(w * t for t in g.direction)
    return GeodesicDatum(
        length=length,
        morse_index=sum(_leg_index(leg) for leg in legs),
        homotopy_class=c,
        initial_covector=tuple(cov),
        legs=tuple(legs),
    )


def is_in_submanifold(m: Manifold, q: Submanifold, x) -> bool:
    _validate(m, q)
    if isinstance(m, Product):
        return is_in_submanifold(m.left, q.left, x[0]) and is_in_submanifold(m.right, q.right, x[1])
    if isinstance(m, FlatTorus):
        return _torus_nearest(m, q, x)[1] <= POINT_TOL
    u, pv, pp = _sphere_split(m, q, x)
    if isinstance(q, SinglePoint):
        # the span of a point also contains its antipode
        return float(np.linalg.norm(u - _unit(q.coordinates))) <= POINT_TOL
    return float(np.linalg.norm(pp)) <= POINT_TOL


def is_focal_point(m: Manifold, q: Submanifold, x) -> bool:
    """Whether x is focal for Q along some normal geodesic."""
    _validate(m, q)
    if isinstance(m, Product):
        return is_focal_point(m.left, q.left, x[0]) or is_focal_point(m.right, q.right, x[1])
    if isinstance(m, FlatTorus):
        return False
    u, pv, pp = _sphere_split(m, q, x)
    npv, npp = float(np.linalg.norm(pv)), float(np.linalg.norm(pp))
    if isinstance(q, SinglePoint):
        return npp <= POINT_TOL and float(u @ _unit(q.coordinates)) < 0
    V = _sphere_subspace(m, q)
    if V.shape[0] == m.dimension + 1:
        return False
    return npv <= POINT_TOL or npp <= POINT_TOL


def enumerate_geodesics(m: Manifold, q: Submanifold, x1, c: HomotopyClass, length_cap: float) -> list[GeodesicDatum]:
    """All geodesics from Q to x1, normal to Q, in class ``c`` with length <= ``length_cap``."""
    if not length_cap > 0:
        raise BadParameters("length_cap must be positive")
    _validate(m, q)
    if is_in_submanifold(m, q, x1):
        raise BadParameters("endpoint lies on Q")
    if is_focal_point(m, q, x1):
        raise FocalPointEndpoint("endpoint is a focal point of Q")
    leaves = _leaves(m, q, x1, c)
    per_leaf = [_leaf_legs(lm, lq, lx, lc, length_cap) for lm, lq, lx, lc in leaves]
    out = []
    for combo in itertools.product(*per_leaf):
        total = math.sqrt(sum(g.length**2 for g in combo))
        if 0 < total <= length_cap:
            out.append(_assemble(combo, c))
    out.sort(key=lambda g: (g.length, g.morse_index, tuple(l.length for l in g.legs)))
    return out


# -- Jacobi field oracle -------------------------------------------------------------


def _frame(legs: Sequence[Leg]):
    """Orthonormal tangent frame, Q-tangent flags and curvature matrix K.

    In a parallel frame along a geodesic of a symmetric space the curvature
    operator X -> R(X, g')g' is constant; for a product it is block diagonal.
    """
    blocks = []
    for g in legs:
        n = g.dimension
        if g.family == "flat":
            ambient = np.eye(n)
        else:
            p = np.asarray(g.start) / g.radius
            ambient = _complete_basis(np.eye(n + 1), p[None, :])
        tq = np.asarray(g.tangent_q, dtype=float).reshape(-1, ambient.shape[1])
        normal = _complete_basis(ambient, tq)
        vel = g.length * np.asarray(g.direction, dtype=float)
        vecs = np.vstack([tq, normal])
        kappa = 0.0 if g.family == "flat" else 1.0 / g.radius**2
        # R(X, v)v = kappa (|v|^2 X - <X, v> v) on a space form
        RX = kappa * ((vel @ vel) * vecs - np.outer(vecs @ vel, vel))
        K = vecs @ RX.T
        blocks.append((K, tq.shape[0], normal.shape[0]))
    size = sum(b[1] + b[2] for b in blocks)
    K = np.zeros((size, size))
    in_q = np.zeros(size, dtype=bool)
    pos = 0
    for Kb, dq, dn in blocks:
        k = dq + dn
        K[pos:pos + k, pos:pos + k] = Kb
        in_q[pos:pos + dq] = True
        pos += k
    return K, in_q


def _rk4_step(K: np.ndarray, Y: np.ndarray, Z: np.ndarray, h: float):
    # Y'' = -K Y written as (Y, Z = Y')
    k1y, k1z = Z, -K @ Y
    k2y, k2z = Z + 0.5 * h * k1z, -K @ (Y + 0.5 * h * k1y)
    k3y, k3z = Z + 0.5 * h * k2z, -K @ (Y + 0.5 * h * k2y)
    k4y, k4z = Z + h * k3z, -K @ (Y + h * k3y)
    return (Y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y), Z + h / 6 * (k1z + 2 * k2z + 2 * k3z + k4z))


def _golden_min(fn, lo: float, hi: float, iters: int = 90) -> float:
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return c if fc <= fd else d


def jacobi_oracle(m: Manifold, q: Submanifold, geodesic: GeodesicDatum, steps: int = 4000, threshold: float = 1e-8):
    """Morse index and focal times from numerical integration of the Jacobi equation.

    Returns ``(index, focal_times)`` where ``focal_times`` lists ``(t, multiplicity)``.
    """
    if steps < 1000:
        raise BadParameters("steps must be at least 1000")
    K, in_q = _frame(geodesic.legs)
    size = K.shape[0]
    ell = geodesic.length
    # columns: Q-tangent fields J(0) = e, J'(0) = S e = 0; the rest J(0) = 0, J'(0) = ell e
    Y = np.diag(in_q.astype(float))
    Z = np.diag(np.where(in_q, 0.0, ell))
    h = 1.0 / steps
    states = [(Y, Z)]
    for _ in range(steps):
        Y, Z = _rk4_step(K, Y, Z, h)
        states.append((Y, Z))
    Ys = np.stack([s[0] for s in states])
    sig = np.linalg.svd(Ys, compute_uv=False)
    smin = sig[:, -1]
    scale = max(1.0, float(sig[:, 0].max()))
    speed = max(1.0, float(max(np.abs(s[1]).max() for s in states)))
    coarse = 4.0 * h * speed
    tol = threshold * scale

    def smin_at(i0: int, t: float) -> tuple[float, np.ndarray]:
        Y0, Z0 = states[i0]
        t0 = i0 * h
        sub = max(1, int(math.ceil((t - t0) / h)))
        hh = (t - t0) / sub
        for _ in range(sub):
            Y0, Z0 = _rk4_step(K, Y0, Z0, hh)
        s = np.linalg.svd(Y0, compute_uv=False)
        return float(s[-1]), s

    found: list[tuple[float, int]] = []
    for i in range(1, steps + 1):
        last = i == steps
        if smin[i] > coarse or smin[i] > smin[i - 1] or (not last and smin[i] > smin[i + 1]):
            continue
        lo_i = i - 1
        t_star = _golden_min(lambda t: smin_at(lo_i, t)[0], lo_i * h, min(1.0, (i + 1) * h))
        val, svals = smin_at(lo_i, t_star)
        at_end = t_star >= 1.0 - FOCAL_RTOL
        if val <= tol:
            if at_end:
                raise FocalPointEndpoint("Jacobi determinant vanishes at the endpoint")
            if not (found and abs(found[-1][0] - t_star) <= 2 * h):
                found.append((t_star, int(np.sum(svals <= tol))))
        elif not (last and at_end):
            raise NonConvergence(f"could not resolve a crossing near t={t_star!r} (residual {val:.3e})")
    return sum(k for _, k in found), tuple(found)


# -- assumption ----------------------------------------------------------------------------

FAMILY_METADATA = {
    "flat": "one geodesic per class, all of index 0 (nonpositive curvature, zero shape operator)",
    "sphere-index-gap": "round sphere of dimension n >= 3 with a point: every index is a multiple of n - 1",
    "focal-count": "closed-form focal catalog: the index grows with length, so a finite length bounds each index",
    "product": "product of certified factors; indices add and lengths combine in quadrature",
    "lie-group": "compact semisimple Lie group with bi-invariant metric (metadata only; S^3 realizes SU(2))",
    "symmetric-space": "compact symmetric spaces with curvature-operator bounds (metadata only)",
}


def _leaf_certification(m, q) -> str:
    if isinstance(m, FlatTorus):
        return "flat"
    if isinstance(q, SinglePoint) and m.dimension >= 3:
        return "sphere-index-gap"
    return "focal-count"


def _leaf_index_length_bound(m, q, x, c, max_index: int) -> float:
    """Largest leg length among leg geodesics of index <= max_index (0 if none)."""
    if isinstance(m, FlatTorus):
        return max((g.length for g in _torus_legs(m, q, x, c)), default=0.0)
    probe = Leg("sphere", m.dimension, m.radius, submanifold_dimension(m, q),
                "point" if isinstance(q, SinglePoint) else "subsphere", 0.0, (), (), ())
    # first focal angle at which the cumulative multiplicity exceeds max_index
    total, limit = 0, None
    upto = math.pi * (max_index + 3)
    for ang, mult in _leg_focal_angles(probe, upto):
        total += mult
        if total > max_index:
            limit = ang
            break
    if limit is None:
        return 0.0 if probe.q_dim == m.dimension else math.inf
    legs = _sphere_legs(m, q, x, m.radius * limit)
    return max((g.length for g in legs), default=0.0)


@dataclass(frozen=True)
class AssumptionReport:
    k: int
    n: int
    d: int
    clause_i: bool
    clause_ii: bool
    clause_iii: bool
    clause_iv: bool
    l_k: float | None
    L: float | None
    length_cap: float
    search_cap: float
    certification: tuple[str, ...]
    index_k: tuple[GeodesicDatum, ...] = field(repr=False)
    index_k2: tuple[GeodesicDatum, ...] = field(repr=False)
    index_adjacent: tuple[GeodesicDatum, ...] = field(repr=False)

    @property
    def holds(self) -> bool:
        return self.clause_i and self.clause_ii and self.clause_iii and self.clause_iv

    @property
    def failing_clause(self) -> str | None:
        for name, ok in (("i", self.clause_i), ("ii", self.clause_ii), ("iii", self.clause_iii), ("iv", self.clause_iv)):
            if not ok:
                return name
        return None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "d": self.d,
            "clauses": {"i": self.clause_i, "ii": self.clause_ii, "iii": self.clause_iii, "iv": self.clause_iv},
            "holds": self.holds,
            "l_k": self.l_k,
            "L": self.L,
            "length_cap": self.length_cap,
            "search_cap": self.search_cap,
            "certification": list(self.certification),
            "index_k_lengths": [g.length for g in self.index_k],
            "index_k_plus_2_lengths": [g.length for g in self.index_k2],
            "adjacent_index_lengths": [g.length for g in self.index_adjacent],
        }


def check_assumption(
    m: Manifold,
    q: Submanifold,
    x1,
    c: HomotopyClass,
    k: int,
    length_cap: float,
    strict: bool = True,
    trust_metadata: bool = True,
) -> AssumptionReport:
    """Check the four clauses of the index assumption for class ``c`` and degree ``k``.

    Family metadata turns the cap-bounded enumeration into a global statement:
    for each factor we know a length beyond which every geodesic has index
    above ``k + 2``, and enumerate up to the larger of that and ``length_cap``.
    With ``strict`` a failing clause raises :class:`AssumptionViolated`.
    """
    if k < 0:
        raise BadParameters("k must be nonnegative")
    n = m.dimension
    d = submanifold_dimension(m, q)
    if not d < n:
        raise BadParameters("Q must have dimension below that of the manifold")
    leaves = _leaves(m, q, x1, c)
    if not trust_metadata:
        raise CapTooSmall("without family metadata the global clauses cannot be certified beyond the cap")
    bounds = [_leaf_index_length_bound(lm, lq, lx, lc, k + 2) for lm, lq, lx, lc in leaves]
    if any(math.isinf(b) for b in bounds):
        raise CapTooSmall("no index bound available for some factor")
    need = math.sqrt(sum(b * b for b in bounds))
    search_cap = max(float(length_cap), need * (1 + 1e-12) + 1e-12)
    geos = enumerate_geodesics(m, q, x1, c, search_cap)
    gk = tuple(g for g in geos if g.morse_index == k)
    gk2 = tuple(g for g in geos if g.morse_index == k + 2)
    adj = tuple(g for g in geos if g.morse_index in (k - 1, k + 1))
    kinds = sorted({_leaf_certification(lm, lq) for lm, lq, _, _ in leaves})
    if isinstance(m, Product):
        kinds = ["product", *kinds]
    both = gk + gk2
    report = AssumptionReport(
        k=k,
        n=n,
        d=d,
        clause_i=bool(gk),
        clause_ii=True,
        clause_iii=not adj,
        clause_iv=(n - d != 2) or k != 0,
        l_k=min((g.length for g in gk), default=None),
        L=max((g.length for g in both), default=None),
        length_cap=float(length_cap),
        search_cap=search_cap,
        certification=tuple(kinds),
        index_k=gk,
        index_k2=gk2,
        index_adjacent=adj,
    )
    if strict and not report.holds:
        clause = report.failing_clause
        msg = {
            "i": f"no geodesic of index {k} in the class",
            "iii": f"geodesics of index {k - 1} or {k + 1} exist",
            "iv": "n - d = 2 with k = 0",
        }.get(clause, "")
        raise AssumptionViolated(clause, msg, report)
    return report
