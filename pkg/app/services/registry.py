"""
Distance registry.

Builds an NDistance from its command-line name. Names compose with the
combinators ``add(a,b)``, ``scale(a,lambda)``, ``bound(a)`` and ``hemi(a)``,
for example ``bound(add(drastic,cardinality))``.
"""

from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from app.services import elementary, fermat, geometry
from app.services.core import NDistance
from app.services.errors import ArgumentError, ConfigurationError
from app.services.spaces import IntegerLine, IntegerPlane, LabelSpace, Plane, RealLine, Space
from lib.exact_lib import parse_number

ALIASES = {
    "sum_pairwise": "sum",
    "radius": "sec_radius",
    "area": "sec_area",
    "direction": "directions",
    "fermat": "fermat_euclidean",
}

# smallest admissible arity per distance
MIN_ARITY = {
    "drastic": 2,
    "cardinality": 2,
    "diameter": 2,
    "sum": 2,
    "arithmetic_mean": 2,
    "ap": 3,
    "sec_radius": 2,
    "sec_area": 3,
    "directions": 3,
    "fermat_euclidean": 2,
    "fermat_graph": 2,
    "fermat3_graph": 3,
}

DISTANCE_NAMES = tuple(MIN_ARITY)
COMBINATORS = ("add", "scale", "bound", "hemi")


def canonical_name(name: str) -> str:
    name = name.strip()
    return ALIASES.get(name, name)


def _split_call(expr: str) -> Optional[Tuple[str, List[str]]]:
    """``f(a,g(b,c))`` -> ("f", ["a", "g(b,c)"]); None for a bare name."""
    expr = expr.strip()
    if "(" not in expr:
        return None
    head, _, rest = expr.partition("(")
    if not rest.endswith(")"):
        raise ConfigurationError(f"unbalanced parentheses in {expr!r}")
    body = rest[:-1]
    args, depth, current = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ConfigurationError(f"unbalanced parentheses in {expr!r}")
        if ch == "," and depth == 0:
            args.append(current.strip())
            current = ""
        else:
            current += ch
    if depth != 0:
        raise ConfigurationError(f"unbalanced parentheses in {expr!r}")
    args.append(current.strip())
    return head.strip(), args


def _space_for(name: str, params: Dict[str, Any]) -> Optional[Space]:
    """The sampling space a distance runs on, honoring user parameters."""
    kind = params.get("space")
    if name in ("drastic", "cardinality"):
        if kind == "plane":
            return IntegerPlane(params.get("coord_max"))
        return LabelSpace(params.get("labels"))
    if name in ("diameter", "sum", "arithmetic_mean"):
        if kind == "plane" and name != "arithmetic_mean":
            return Plane(params.get("low"), params.get("high"))
        return RealLine(params.get("low"), params.get("high"))
    if name == "ap":
        return IntegerLine(params.get("low"), params.get("high"))
    if name in ("sec_radius", "sec_area", "fermat_euclidean"):
        if kind == "integers":
            return IntegerPlane(params.get("coord_max"))
        if name == "fermat_euclidean" and params.get("dimension", 2) != 2:
            return None
        return Plane(params.get("low"), params.get("high"))
    if name == "directions":
        return IntegerPlane(params.get("coord_max"))
    return None


def _base(name: str, n: int, params: Dict[str, Any], graph: Optional[nx.Graph], unsafe: bool) -> NDistance:
    minimum = MIN_ARITY.get(name)
    if minimum is None:
        raise ConfigurationError(f"unknown distance {name!r}; known: {', '.join(DISTANCE_NAMES)}")
    if n < minimum and not (name == "sec_area" and unsafe and n == 2):
        raise ConfigurationError(f"{name} needs n >= {minimum}, got {n}")
    space = _space_for(name, params)

    if name == "drastic":
        return elementary.drastic(n, space)
    if name == "cardinality":
        return elementary.cardinality(n, space)
    if name in ("diameter", "sum"):
        build = elementary.diameter if name == "diameter" else elementary.sum_pairwise
        if space is not None and space.tag == "plane":
            return build(n, elementary.euclidean, space, anchors=((0, 0), (1, 0)))
        return build(n, elementary.absolute_difference, space)
    if name == "arithmetic_mean":
        return elementary.arithmetic_mean(n, space)
    if name == "ap":
        return elementary.ap_distance(n, space)
    if name == "sec_radius":
        return geometry.radius_distance(n, space)
    if name == "sec_area":
        return geometry.area_distance(n, space, unsafe=unsafe)
    if name == "directions":
        return geometry.direction_distance(n, space)
    if name == "fermat_euclidean":
        return fermat.fermat_distance_euclidean(n, int(params.get("dimension", 2)), space)

    if graph is None:
        raise ConfigurationError(f"{name} needs a graph (--graph)")
    if name == "fermat3_graph":
        return fermat.fermat3_graph_distance(graph)
    return fermat.fermat_graph_distance(graph, n)


def make_distance(
    name: str,
    n: int,
    space_params: Optional[Dict[str, Any]] = None,
    graph: Optional[nx.Graph] = None,
    unsafe: bool = False,
) -> NDistance:
    """
    Build the n-ary distance called ``name``.

    Raises:
        ConfigurationError: unknown name, arity below the distance's minimum,
            malformed combinator expression or incompatible operands
    """
    params = dict(space_params or {})
    call = _split_call(name)
    if call is None:
        return _base(canonical_name(name), n, params, graph, unsafe)

    head, args = call
    if head == "add":
        if len(args) != 2:
            raise ConfigurationError("add takes two distances")
        left, right = (make_distance(a, n, params, graph, unsafe) for a in args)
        return elementary.combine_add(left, right)
    if head == "scale":
        if len(args) != 2:
            raise ConfigurationError("scale takes a distance and a factor")
        try:
            factor = parse_number(args[1])
        except ValueError as exc:
            raise ConfigurationError(f"bad scale factor {args[1]!r}") from exc
        try:
            return elementary.scale(make_distance(args[0], n, params, graph, unsafe), factor)
        except ArgumentError as exc:
            raise ConfigurationError(str(exc)) from exc
    if head in ("bound", "hemi"):
        if len(args) != 1:
            raise ConfigurationError(f"{head} takes one distance")
        inner = make_distance(args[0], n, params, graph, unsafe)
        return elementary.bound(inner) if head == "bound" else elementary.to_hemimetric(inner)
    raise ConfigurationError(f"unknown combinator {head!r}; known: {', '.join(COMBINATORS)}")
