"""Filtered, graded chain complexes over GF(2) and their boundary depth.

Boundary depth is the least ``beta`` such that every boundary has a primitive
whose filtration exceeds its own by at most ``beta``.  It equals the longest
finite bar of the barcode, which we read off a standard column reduction.
"""

from __future__ import annotations

import bisect
import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import kernels
from .errors import BudgetExceeded, Infeasible, InvariantViolation, NoPrimitiveAvailable

__all__ = [
    "Generator",
    "FilteredComplex",
    "DepthCertificate",
    "as_generators",
    "admissible_entries",
    "barcode",
    "boundary_depth",
    "depth_by_degree",
    "exhaustive_depth",
    "opposite",
    "shifted",
    "min_depth_over_admissible",
    "certificate_lower_bound",
    "quasiequivalence_gap",
    "relabel_invariance_check",
    "BRUTE_FORCE_BUDGET",
    "forced_ranks",
]

BRUTE_FORCE_BUDGET = 24
DEPTH_TOL = 1e-12


@dataclass(frozen=True)
class Generator:
    id: str
    grading: int
    filtration: float


def as_generators(gens: Iterable) -> tuple[Generator, ...]:
    out = []
    for g in gens:
        if isinstance(g, Generator):
            out.append(g)
        elif isinstance(g, dict):
            out.append(Generator(str(g["id"]), int(g["grading"]), float(g["filtration"])))
        else:
            gid, gr, fl = g
            out.append(Generator(str(gid), int(gr), float(fl)))
    return tuple(out)


@dataclass(frozen=True)
class FilteredComplex:
    """Generators plus an optional differential given as (target, source) id pairs."""

    generators: tuple[Generator, ...]
    differential: frozenset | None = None

    def __post_init__(self):
        gens = as_generators(self.generators)
        object.__setattr__(self, "generators", gens)
        ids = [g.id for g in gens]
        if len(set(ids)) != len(ids):
            raise InvariantViolation("generator ids must be unique")
        filts = [g.filtration for g in gens]
        if len(set(filts)) != len(filts):
            raise InvariantViolation("filtration values must be pairwise distinct")
        if any(not math.isfinite(f) for f in filts):
            raise InvariantViolation("filtration values must be finite")
        if self.differential is not None:
            entries = frozenset((str(t), str(s)) for t, s in self.differential)
            object.__setattr__(self, "differential", entries)
            by_id = {g.id: g for g in gens}
            for t, s in entries:
                if t not in by_id or s not in by_id:
                    raise InvariantViolation(f"entry ({t}, {s}) refers to an unknown generator")
                gt, gs = by_id[t], by_id[s]
                if gt.grading != gs.grading - 1:
                    raise InvariantViolation(f"entry ({t}, {s}) does not lower the grading by one")
                if not gt.filtration < gs.filtration:
                    raise InvariantViolation(f"entry ({t}, {s}) does not strictly lower the filtration")
            cols = self.columns()
            for v in cols:
                acc = 0
                while v:
                    low = v.bit_length() - 1
                    acc ^= cols[low]
                    v ^= 1 << low
                if acc:
                    raise InvariantViolation("differential does not square to zero")

    def order(self) -> list[Generator]:
        """Generators in increasing filtration order (the bit order of columns)."""
        return sorted(self.generators, key=lambda g: g.filtration)

    def columns(self) -> list[int]:
        order = self.order()
        pos = {g.id: i for i, g in enumerate(order)}
        cols = [0] * len(order)
        for t, s in self.differential or ():
            cols[pos[s]] |= 1 << pos[t]
        return cols

    def to_json(self) -> dict:
        gens = sorted(self.generators, key=lambda g: (g.grading, g.filtration))
        out = {"generators": [{"id": g.id, "grading": g.grading, "filtration": g.filtration} for g in gens]}
        if self.differential is not None:
            out["entries"] = sorted([t, s] for t, s in self.differential)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FilteredComplex":
        entries = data.get("entries")
        return cls(as_generators(data["generators"]), None if entries is None else frozenset(map(tuple, entries)))


def barcode(c: FilteredComplex) -> list[tuple[str, str | None, float]]:
    """Bars as (birth id, death id or None, length); infinite bars have length inf."""
    order = c.order()
    pairs = kernels.reduce_pairs(c.columns())
    paired = set()
    bars = []
    for low, j in pairs:
        paired.update((low, j))
        bars.append((order[low].id, order[j].id, order[j].filtration - order[low].filtration))
    for i, g in enumerate(order):
        if i not in paired:
            bars.append((g.id, None, math.inf))
    return bars


def boundary_depth(c: FilteredComplex) -> float:
    """Longest finite bar; 0 for the empty complex or a zero differential."""
    if c.differential is None:
        raise InvariantViolation("boundary depth needs an explicit differential")
    order = c.order()
    best = 0.0
    for low, j in kernels.reduce_pairs(c.columns()):
        best = max(best, order[j].filtration - order[low].filtration)
    return best


def depth_by_degree(c: FilteredComplex) -> dict[int, float]:
    """Depth of boundaries in each degree (keyed by the boundary's grading)."""
    out: dict[int, float] = defaultdict(float)
    order = c.order()
    for low, j in kernels.reduce_pairs(c.columns()):
        g = order[low].grading
        out[g] = max(out[g], order[j].filtration - order[low].filtration)
    return dict(out)


def exhaustive_depth(c: FilteredComplex, max_per_degree: int = 16) -> float:
    """Depth by enumerating every primitive of every boundary (small complexes only)."""
    if c.differential is None:
        raise InvariantViolation("boundary depth needs an explicit differential")
    by_id = {g.id: g for g in c.generators}
    bd = defaultdict(set)
    for t, s in c.differential:
        bd[s].add(t)
    degrees = sorted({g.grading for g in c.generators})
    best = 0.0
    for k in degrees:
        upper = [g for g in c.generators if g.grading == k + 1]
        if len(upper) > max_per_degree:
            raise ValueError("too many generators for exhaustive search")
        cheapest: dict[frozenset, float] = {}
        for size in range(1, len(upper) + 1):
            for chain in itertools.combinations(upper, size):
                image: set = set()
                for g in chain:
                    image ^= bd[g.id]
                if not image:
                    continue
                key = frozenset(image)
                lev = max(g.filtration for g in chain)
                if lev < cheapest.get(key, math.inf):
                    cheapest[key] = lev
        for x, lev in cheapest.items():
            best = max(best, lev - max(by_id[i].filtration for i in x))
    return best


def opposite(c: FilteredComplex) -> FilteredComplex:
    gens = tuple(Generator(g.id, -g.grading, -g.filtration) for g in c.generators)
    diff = None if c.differential is None else frozenset((s, t) for t, s in c.differential)
    return FilteredComplex(gens, diff)


def shifted(c: FilteredComplex, grade_shift: int = 0, filt_shift: float = 0.0) -> FilteredComplex:
    gens = tuple(Generator(g.id, g.grading + grade_shift, g.filtration + filt_shift) for g in c.generators)
    return FilteredComplex(gens, c.differential)


def admissible_entries(gens) -> list[tuple[str, str]]:
    """All (target, source) pairs allowed in a differential on ``gens``."""
    gens = as_generators(gens)
    by_grade = defaultdict(list)
    for g in gens:
        by_grade[g.grading].append(g)
    out = []
    for s in gens:
        for t in by_grade.get(s.grading - 1, ()):
            if t.filtration < s.filtration:
                out.append((t.id, s.id))
    return sorted(out)


def forced_ranks(gens) -> dict[int, int] | None:
    """Rank of the differential leaving each degree in any exact complex on ``gens``.

    Exactness means dim C_k = r_k + r_(k+1), and r vanishes below the lowest
    degree, so the counts determine every r_k.  None when no choice works.
    """
    counts: dict[int, int] = defaultdict(int)
    for g in as_generators(gens):
        counts[g.grading] += 1
    if not counts:
        return {}
    lo, hi = min(counts), max(counts)
    ranks = {lo: 0}
    for k in range(lo, hi + 1):
        ranks[k + 1] = counts[k] - ranks[k]
        if ranks[k + 1] < 0:
            return None
    if ranks[hi + 1] != 0:
        return None
    return ranks


def _euler_feasible(gens: Sequence[Generator]) -> bool:
    """Whether some ranks make every degree exact: dim C_k = r_k + r_(k+1)."""
    return forced_ranks(gens) is not None


def min_depth_over_admissible(gens, budget: int = BRUTE_FORCE_BUDGET) -> tuple[float, FilteredComplex]:
    """Least boundary depth over acyclic differentials supported on admissible entries."""
    gens = as_generators(gens)
    FilteredComplex(gens)  # validates ids and distinct filtrations
    entries = admissible_entries(gens)
    if len(entries) > budget:
        raise BudgetExceeded(f"{len(entries)} admissible entries exceed the budget of {budget}")
    if not _euler_feasible(gens):
        raise Infeasible("generator counts per grading admit no exact complex")
    order = sorted(gens, key=lambda g: g.filtration)
    pos = {g.id: i for i, g in enumerate(order)}
    rows: list[list[int]] = [[] for _ in order]
    for t, s in entries:
        rows[pos[s]].append(pos[t])
    for r in rows:
        r.sort()
    beta, cols, _ = kernels.search_min_depth(
        [g.filtration for g in order], [g.grading for g in order], rows
    )
    if cols is None:
        raise Infeasible("no admissible differential has vanishing homology")
    diff = frozenset(
        (order[i].id, order[j].id) for j, v in enumerate(cols) for i in range(len(order)) if v >> i & 1
    )
    witness = FilteredComplex(gens, diff)
    return (0.0 if not order else beta), witness


@dataclass(frozen=True)
class DepthCertificate:
    """Lower bound on the depth of every acyclic admissible differential.

    ``witness`` is a forced cycle: nothing one degree down has lower
    filtration, so it must be a boundary, and any primitive costs at least
    ``p_min``.  ``direct_bound`` and ``opposite_bound`` record both clauses.
    """

    witness: str | None
    grading: int | None
    action: float | None
    p_min: float | None
    bound: float
    clause: str | None
    direct_bound: float = 0.0
    opposite_bound: float = 0.0

    def to_json(self) -> dict:
        return {
            "witness": self.witness,
            "grading": self.grading,
            "action": self.action,
            "p_min": self.p_min,
            "bound": self.bound,
            "clause": self.clause,
            "direct_bound": self.direct_bound,
            "opposite_bound": self.opposite_bound,
        }


def _forced_cycle_bound(gens: Sequence[Generator]):
    by_grade: dict[int, list[float]] = defaultdict(list)
    for g in gens:
        by_grade[g.grading].append(g.filtration)
    for v in by_grade.values():
        v.sort()
    ranks = forced_ranks(gens) or {}
    best = None
    for g in sorted(gens, key=lambda g: (g.grading, g.filtration)):
        below = by_grade.get(g.grading - 1)
        # g is a cycle if nothing cheaper sits one degree down, or if the
        # counts force the differential out of its degree to vanish
        if below and below[0] < g.filtration and ranks.get(g.grading) != 0:
            continue
        above = by_grade.get(g.grading + 1, [])
        i = bisect.bisect_right(above, g.filtration)
        if i == len(above):
            raise NoPrimitiveAvailable(f"forced cycle {g.id} has no admissible primitive")
        p_min = above[i]
        bound = p_min - g.filtration
        if best is None or bound > best[1]:
            best = (g, bound, p_min)
    return best


def certificate_lower_bound(gens) -> DepthCertificate:
    """Forced-cycle bound, evaluated on the complex and on its opposite."""
    gens = as_generators(gens)
    direct = _forced_cycle_bound(gens)
    opp_gens = [Generator(g.id, -g.grading, -g.filtration) for g in gens]
    dual = _forced_cycle_bound(opp_gens)
    d_bound = direct[1] if direct else 0.0
    o_bound = dual[1] if dual else 0.0
    if direct is None and dual is None:
        return DepthCertificate(None, None, None, None, 0.0, None)
    if dual is None or (direct is not None and d_bound >= o_bound):
        g, bound, p = direct
        return DepthCertificate(g.id, g.grading, g.filtration, p, bound, "direct", d_bound, o_bound)
    g, bound, p = dual
    # report the witness in the original grading and filtration
    return DepthCertificate(g.id, -g.grading, -g.filtration, -p, bound, "opposite", d_bound, o_bound)


def quasiequivalence_gap(c1: FilteredComplex, c2: FilteredComplex, delta: float) -> bool:
    """Whether the two depths differ by at most ``delta``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    b1, b2 = boundary_depth(c1), boundary_depth(c2)
    return abs(b1 - b2) <= delta + DEPTH_TOL * max(1.0, abs(b1), abs(b2))


def relabel_invariance_check(c: FilteredComplex, grade_shift: int, filt_shift: float) -> bool:
    return abs(boundary_depth(shifted(c, grade_shift, filt_shift)) - boundary_depth(c)) <= DEPTH_TOL
