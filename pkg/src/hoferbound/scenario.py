"""Scenario documents: versioned JSON describing geometry, bump and coefficients.

Example::

    {
      "schema": 1,
      "name": "s3-mixed-bands",
      "manifold": {"family": "round_sphere", "dimension": 3, "radius": 1.0},
      "submanifold": {"kind": "point", "coordinates": [1, 0, 0, 0]},
      "endpoint": {"distance": 1.0},
      "class": null,
      "k": 0,
      "bump": {"R": 0.5, "delta": 0.05},
      "a": [4, -6, 1, 2, -4],
      "b": []
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .errors import BadParameters, ScenarioError
from .geometry import (
    FlatTorus,
    GreatSubsphere,
    Product,
    ProductOf,
    RoundSphere,
    SinglePoint,
    Subtorus,
    make_class,
    whole,
)
from .profile import SparseCoefficients

__all__ = ["Scenario", "SCHEMA_VERSION", "load_scenario", "parse_scenario", "parse_manifold", "parse_submanifold"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Scenario:
    manifold: Any
    submanifold: Any
    endpoint: Any
    homotopy_class: Any
    k: int
    R: float
    delta: float
    a: SparseCoefficients
    b: SparseCoefficients = SparseCoefficients()
    name: str = ""
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def with_coefficients(self, a, b=None) -> "Scenario":
        return replace(
            self,
            a=SparseCoefficients.from_any(a),
            b=SparseCoefficients.from_any(b if b is not None else []),
        )


def parse_manifold(doc: dict):
    fam = str(doc.get("family", "")).lower().replace("-", "_")
    if fam in ("flat_torus", "torus"):
        if "lattice" in doc:
            return FlatTorus(tuple(tuple(float(x) for x in row) for row in doc["lattice"]))
        return FlatTorus.standard(int(doc.get("dimension", doc.get("dimensions"))))
    if fam in ("round_sphere", "sphere"):
        return RoundSphere(int(doc.get("dimension", doc.get("dimensions"))), float(doc.get("radius", 1.0)))
    if fam == "product":
        return Product(parse_manifold(doc["left"]), parse_manifold(doc["right"]))
    raise ScenarioError(f"unknown manifold family {doc.get('family')!r}")


def parse_submanifold(doc: dict, m):
    kind = str(doc.get("kind", "")).lower().replace("-", "_")
    if kind == "whole":
        return whole(m)
    if kind in ("point", "single_point"):
        return SinglePoint(tuple(float(x) for x in doc["coordinates"]))
    if kind == "subtorus":
        n = m.dimension
        return Subtorus(
            tuple(tuple(int(x) for x in row) for row in doc["directions"]),
            tuple(float(x) for x in doc.get("offset", [0.0] * n)),
        )
    if kind in ("great_subsphere", "subsphere"):
        return GreatSubsphere(tuple(tuple(float(x) for x in row) for row in doc["basis"]))
    if kind in ("product", "product_of"):
        if not isinstance(m, Product):
            raise ScenarioError("product submanifold needs a product manifold")
        return ProductOf(parse_submanifold(doc["left"], m.left), parse_submanifold(doc["right"], m.right))
    raise ScenarioError(f"unknown submanifold kind {doc.get('kind')!r}")


def _parse_endpoint(doc, m, q):
    if isinstance(m, Product):
        if isinstance(doc, dict):
            return (_parse_endpoint(doc["left"], m.left, q.left), _parse_endpoint(doc["right"], m.right, q.right))
        return (_parse_endpoint(doc[0], m.left, q.left), _parse_endpoint(doc[1], m.right, q.right))
    if isinstance(doc, dict) and "distance" in doc:
        # shorthand: a point at the given geodesic distance from a point Q on a sphere
        if not (isinstance(m, RoundSphere) and isinstance(q, SinglePoint)):
            raise ScenarioError("endpoint distance shorthand needs a sphere with a point")
        x0 = np.asarray(q.coordinates, dtype=float)
        x0 = x0 / np.linalg.norm(x0)
        e = next(v for v in np.eye(len(x0)) if abs(v @ x0) < 0.9)
        e = e - (e @ x0) * x0
        e /= np.linalg.norm(e)
        ang = float(doc["distance"]) / m.radius
        return tuple((math.cos(ang) * x0 + math.sin(ang) * e).tolist())
    return tuple(float(x) for x in doc)


def _parse_coeffs(doc) -> SparseCoefficients:
    if doc is None:
        return SparseCoefficients()
    if isinstance(doc, dict):
        return SparseCoefficients.from_any({int(k): float(v) for k, v in doc.items()})
    return SparseCoefficients.from_any([float(v) for v in doc])


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported scenario schema {doc.get('schema')!r}; expected {SCHEMA_VERSION}")
    try:
        m = parse_manifold(doc["manifold"])
        q = parse_submanifold(doc["submanifold"], m)
        x1 = _parse_endpoint(doc["endpoint"], m, q)
        c = make_class(m, q, doc.get("class"), x1)
        bump = doc.get("bump", {})
        R = float(bump.get("R", doc.get("R", 0.5)))
        delta = float(bump.get("delta", doc.get("delta", R / 10)))
        k = int(doc.get("k", 0))
    except KeyError as exc:
        raise ScenarioError(f"missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from None
    if k < 0 or k == 1:
        raise BadParameters("k must be nonnegative and different from 1")
    return Scenario(
        manifold=m,
        submanifold=q,
        endpoint=x1,
        homotopy_class=c,
        k=k,
        R=R,
        delta=delta,
        a=_parse_coeffs(doc.get("a")),
        b=_parse_coeffs(doc.get("b")),
        name=str(doc.get("name", "")),
        source=doc,
    )


def load_scenario(path: str | Path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return parse_scenario(doc)
