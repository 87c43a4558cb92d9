"""
JSON problem files.

    {
      "name": "...", "p": 2, "q": 2,
      "cone": {"type": "polyhedral", "m": 2, "normals": [[1, -1], [-1, 0]]},
      "map": {"type": "combination", "terms": [{"fn": {...}, "weight": [...]}]},
      "options": {"max_iter": 100}
    }

Numbers are JSON numbers or exact rationals written as strings ("1/12").
"""

import json
import logging
from dataclasses import fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .builtin_problems import get_builtin
from .errors import LorentzError, ProblemFileError
from .isotone_maps import build_combination
from .models import (
    AffineDescriptor, AffineMap, ArctanDescriptor, BuiltinMap, CombinationMap,
    CombinationTerm, Composed, ComposedDescriptor, ConeSpec, ExpDescriptor,
    HyperplaneCone, IsotoneCombination, LorentzAffine, MapSpec, MonotoneScalarFn,
    OrthantCone, PiecewiseLinearDescriptor, PolyhedralCone, Problem, ProductCone,
    ScalarDescriptor, SecondOrderCone, SeparableSimplicial, SolveOptions,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]


class _Reader:
    """Walks a decoded document, turning every failure into a ProblemFileError naming the field"""

    def __init__(self, source: Optional[str]):
        self.source = source

    def fail(self, message: str, field: str) -> ProblemFileError:
        return ProblemFileError(message, path=self.source, field=field)

    def get(self, data: Mapping, key: str, where: str, default: Any = ...):
        if not isinstance(data, Mapping):
            raise self.fail("expected an object", where)
        if key not in data:
            if default is ...:
                raise self.fail("missing required field", _join(where, key))
            return default
        return data[key]

    def number(self, value: Any, where: str) -> Number:
        if isinstance(value, bool):
            raise self.fail(f"expected a number, got {value!r}", where)
        if isinstance(value, (int, float)):
            return value
        if isinstance(value, str):
            try:
                return Fraction(value)
            except (ValueError, ZeroDivisionError):
                pass
        raise self.fail(f"expected a number or a rational string like \"1/12\", got {value!r}", where)

    def integer(self, value: Any, where: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(f"expected an integer, got {value!r}", where)
        return value

    def vector(self, value: Any, where: str) -> tuple:
        if not isinstance(value, list):
            raise self.fail("expected a list of numbers", where)
        return tuple(self.number(v, f"{where}[{i}]") for i, v in enumerate(value))

    def matrix(self, value: Any, where: str) -> tuple:
        if not isinstance(value, list):
            raise self.fail("expected a list of rows", where)
        return tuple(self.vector(row, f"{where}[{i}]") for i, row in enumerate(value))

    def tag(self, data: Any, where: str) -> str:
        kind = self.get(data, "type", where)
        if not isinstance(kind, str):
            raise self.fail("type must be a string", _join(where, "type"))
        return kind

    # -------------------------------------------------------------- cones

    def cone(self, data: Any, where: str) -> ConeSpec:
        kind = self.tag(data, where)
        try:
            if kind == "orthant":
                return OrthantCone(self.integer(self.get(data, "m", where), _join(where, "m")))
            if kind == "second_order":
                return SecondOrderCone(self.integer(self.get(data, "m", where), _join(where, "m")))
            if kind == "hyperplane":
                return HyperplaneCone(self.vector(self.get(data, "normal", where), _join(where, "normal")))
            if kind == "polyhedral":
                m = self.integer(self.get(data, "m", where), _join(where, "m"))
                normals = self.get(data, "normals", where, None)
                generators = self.get(data, "generators", where, None)
                return PolyhedralCone(
                    m=m,
                    normals=None if normals is None else self.matrix(normals, _join(where, "normals")),
                    generators=None if generators is None else self.matrix(generators, _join(where, "generators")),
                )
            if kind == "product":
                p = self.integer(self.get(data, "p", where), _join(where, "p"))
                return ProductCone(p, self.cone(self.get(data, "inner", where), _join(where, "inner")))
        except ProblemFileError:
            raise
        except LorentzError as exc:
            raise self.fail(str(exc), where) from exc
        raise self.fail(f"unknown cone type '{kind}'", _join(where, "type"))

    # --------------------------------------------------- scalar functions

    def descriptor(self, data: Any, where: str) -> ScalarDescriptor:
        kind = self.tag(data, where)

        def num(key: str, default: Any = ...):
            value = self.get(data, key, where, default)
            return self.number(value, _join(where, key))

        try:
            if kind == "affine":
                return AffineDescriptor(slope=num("slope"), intercept=num("intercept", 0))
            if kind == "exp":
                return ExpDescriptor(scale=num("scale", 1), rate=num("rate", 1))
            if kind == "arctan":
                return ArctanDescriptor(scale=num("scale", 1), rate=num("rate", 1))
            if kind == "piecewise_linear":
                return PiecewiseLinearDescriptor(
                    breakpoints=self.vector(self.get(data, "breakpoints", where), _join(where, "breakpoints")),
                    values=self.vector(self.get(data, "values", where), _join(where, "values")),
                )
            if kind == "composed":
                return ComposedDescriptor(
                    outer=self.descriptor(self.get(data, "outer", where), _join(where, "outer")),
                    inner=self.descriptor(self.get(data, "inner", where), _join(where, "inner")),
                )
        except ProblemFileError:
            raise
        except LorentzError as exc:
            raise self.fail(str(exc), where) from exc
        raise self.fail(f"unknown descriptor type '{kind}'", _join(where, "type"))

    def scalar_fn(self, data: Any, where: str) -> MonotoneScalarFn:
        kind = self.tag(data, where)
        try:
            if kind == "lorentz_affine":
                return LorentzAffine(
                    d=self.vector(self.get(data, "d", where), _join(where, "d")),
                    beta=self.number(self.get(data, "beta", where, 0), _join(where, "beta")),
                    gamma=self.number(self.get(data, "gamma", where, 0), _join(where, "gamma")),
                )
            if kind == "separable_simplicial":
                g = self.get(data, "g", where)
                if not isinstance(g, list):
                    raise self.fail("expected a list of descriptors", _join(where, "g"))
                return SeparableSimplicial(
                    U=self.matrix(self.get(data, "U", where), _join(where, "U")),
                    g=tuple(self.descriptor(d, f"{_join(where, 'g')}[{i}]") for i, d in enumerate(g)),
                )
            if kind == "composed":
                return Composed(
                    inner=self.scalar_fn(self.get(data, "inner", where), _join(where, "inner")),
                    psi=self.descriptor(self.get(data, "psi", where), _join(where, "psi")),
                )
        except ProblemFileError:
            raise
        except LorentzError as exc:
            raise self.fail(str(exc), where) from exc
        raise self.fail(f"unknown scalar function type '{kind}'", _join(where, "type"))

    # --------------------------------------------------------------- maps

    def map_spec(self, data: Any, where: str, p: int, q: int) -> MapSpec:
        kind = self.tag(data, where)
        if kind == "builtin":
            builtin_id = self.get(data, "id", where)
            return BuiltinMap(str(builtin_id))
        if kind == "affine":
            matrix = self.matrix(self.get(data, "matrix", where), _join(where, "matrix"))
            offset = self.vector(self.get(data, "offset", where), _join(where, "offset"))
            n = p + q
            if len(offset) != n:
                raise self.fail(f"offset has length {len(offset)}, expected p+q={n}", _join(where, "offset"))
            for i, row in enumerate(matrix):
                if len(row) != n:
                    raise self.fail(f"row has length {len(row)}, expected p+q={n}", f"{_join(where, 'matrix')}[{i}]")
            if len(matrix) != n:
                raise self.fail(f"matrix has {len(matrix)} rows, expected p+q={n}", _join(where, "matrix"))
            return AffineMap(matrix=matrix, offset=offset)
        if kind == "combination":
            return CombinationMap(self.combination(data, where, p, q))
        raise self.fail(f"unknown map type '{kind}'", _join(where, "type"))

    def combination(self, data: Any, where: str, p: int, q: int) -> IsotoneCombination:
        raw_terms = self.get(data, "terms", where)
        if not isinstance(raw_terms, list) or not raw_terms:
            raise self.fail("expected a nonempty list of terms", _join(where, "terms"))
        order_data = self.get(data, "order_cone", where, None)
        order_cone = None if order_data is None else self.cone(order_data, _join(where, "order_cone"))
        terms = []
        for i, raw in enumerate(raw_terms):
            term_where = f"{_join(where, 'terms')}[{i}]"
            weight = self.vector(self.get(raw, "weight", term_where), _join(term_where, "weight"))
            if len(weight) != p + q:
                raise self.fail(f"weight has length {len(weight)}, expected p+q={p + q}", _join(term_where, "weight"))
            terms.append(CombinationTerm(self.scalar_fn(self.get(raw, "fn", term_where), _join(term_where, "fn")),
                                         weight))
        try:
            combination = IsotoneCombination(p=p, q=q, terms=tuple(terms), order_cone=order_cone)
        except LorentzError as exc:
            raise self.fail(str(exc), where) from exc
        for i, term in enumerate(combination.terms):
            try:
                build_combination(IsotoneCombination(p=p, q=q, terms=(term,), order_cone=order_cone))
            except LorentzError as exc:
                raise self.fail(str(exc), f"{_join(where, 'terms')}[{i}]") from exc
        return combination

    def options(self, data: Any, where: str) -> Optional[SolveOptions]:
        if data is None:
            return None
        if not isinstance(data, Mapping):
            raise self.fail("expected an object", where)
        known = {f.name for f in fields(SolveOptions)}
        values = {}
        for key, value in data.items():
            if key not in known:
                raise self.fail("unknown option", _join(where, key))
            values[key] = value
        try:
            return SolveOptions(**values)
        except (TypeError, ValueError) as exc:
            raise self.fail(str(exc), where) from exc


def _join(where: str, key: str) -> str:
    return f"{where}.{key}" if where else key


def problem_from_dict(data: Any, source: Optional[str] = None) -> Problem:
    """Build a validated Problem from a decoded JSON document"""
    reader = _Reader(source)
    if not isinstance(data, Mapping):
        raise ProblemFileError("top level must be an object", path=source)
    map_data = reader.get(data, "map", "")
    base = None
    if isinstance(map_data, Mapping) and map_data.get("type") == "builtin":
        try:
            base = get_builtin(str(reader.get(map_data, "id", "map")))
        except ProblemFileError as exc:
            raise ProblemFileError(str(exc.args[0]), path=source, field="map.id") from exc

    name = reader.get(data, "name", "", base.name if base else "problem")
    p = reader.integer(reader.get(data, "p", "", base.p if base else ...), "p")
    q = reader.integer(reader.get(data, "q", "", base.q if base else ...), "q")
    if p < 1 or q < 1:
        raise ProblemFileError(f"p and q must be positive, got p={p}, q={q}", path=source, field="p" if p < 1 else "q")

    cone_data = reader.get(data, "cone", "", None)
    if cone_data is None:
        if base is None:
            raise reader.fail("missing required field", "cone")
        cone = base.cone
    else:
        cone = reader.cone(cone_data, "cone")
    if cone.dim != q:
        raise ProblemFileError(f"cone has dimension {cone.dim} but header q={q}", path=source, field="cone")
    if isinstance(cone, ProductCone):
        raise ProblemFileError("the cone C of a problem cannot itself be a product", path=source, field="cone")

    map_spec = reader.map_spec(map_data, "map", p, q)
    if base is not None and (base.p, base.q) != (p, q):
        raise ProblemFileError(f"builtin map is on p={base.p}, q={base.q}; header has p={p}, q={q}",
                               path=source, field="map")
    options = reader.options(data.get("options"), "options")
    return Problem(name=str(name), p=p, q=q, cone=cone, map_spec=map_spec, options=options)


def parse_problem(path: Union[str, Path]) -> Problem:
    """Read and validate a problem file"""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read file: {exc.strerror}", path=str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, path=str(path), line=exc.lineno) from exc
    problem = problem_from_dict(data, source=str(path))
    logger.info(f"Loaded problem '{problem.name}' from {path} (p={problem.p}, q={problem.q})")
    return problem


# ------------------------------------------------------------ serialization

def encode_number(value: Number) -> Union[int, float, str]:
    """Fractions as "p/q" strings, everything else as a JSON number"""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return value
    return float(value)


def _encode_vector(values) -> List:
    return [encode_number(v) for v in values]


def _encode_matrix(rows) -> List[List]:
    return [_encode_vector(row) for row in rows]


def encode_cone(cone: ConeSpec) -> Dict[str, Any]:
    if isinstance(cone, OrthantCone):
        return {"type": "orthant", "m": cone.m}
    if isinstance(cone, SecondOrderCone):
        return {"type": "second_order", "m": cone.m}
    if isinstance(cone, HyperplaneCone):
        return {"type": "hyperplane", "normal": _encode_vector(cone.normal)}
    if isinstance(cone, PolyhedralCone):
        if cone.by_halfspaces:
            return {"type": "polyhedral", "m": cone.m, "normals": _encode_matrix(cone.normals)}
        return {"type": "polyhedral", "m": cone.m, "generators": _encode_matrix(cone.generators)}
    if isinstance(cone, ProductCone):
        return {"type": "product", "p": cone.p, "inner": encode_cone(cone.inner)}
    raise TypeError(f"cannot serialize {type(cone).__name__}")


def encode_descriptor(desc: ScalarDescriptor) -> Dict[str, Any]:
    if isinstance(desc, AffineDescriptor):
        return {"type": "affine", "slope": encode_number(desc.slope), "intercept": encode_number(desc.intercept)}
    if isinstance(desc, ExpDescriptor):
        return {"type": "exp", "scale": encode_number(desc.scale), "rate": encode_number(desc.rate)}
    if isinstance(desc, ArctanDescriptor):
        return {"type": "arctan", "scale": encode_number(desc.scale), "rate": encode_number(desc.rate)}
    if isinstance(desc, PiecewiseLinearDescriptor):
        return {"type": "piecewise_linear", "breakpoints": _encode_vector(desc.breakpoints),
                "values": _encode_vector(desc.values)}
    if isinstance(desc, ComposedDescriptor):
        return {"type": "composed", "outer": encode_descriptor(desc.outer), "inner": encode_descriptor(desc.inner)}
    raise TypeError(f"cannot serialize {type(desc).__name__}")


def encode_scalar_fn(fn: MonotoneScalarFn) -> Dict[str, Any]:
    if isinstance(fn, LorentzAffine):
        return {"type": "lorentz_affine", "d": _encode_vector(fn.d),
                "beta": encode_number(fn.beta), "gamma": encode_number(fn.gamma)}
    if isinstance(fn, SeparableSimplicial):
        return {"type": "separable_simplicial", "U": _encode_matrix(fn.U),
                "g": [encode_descriptor(g) for g in fn.g]}
    if isinstance(fn, Composed):
        return {"type": "composed", "inner": encode_scalar_fn(fn.inner), "psi": encode_descriptor(fn.psi)}
    raise TypeError(f"cannot serialize {type(fn).__name__}")


def encode_map(map_spec: MapSpec) -> Dict[str, Any]:
    if isinstance(map_spec, BuiltinMap):
        return {"type": "builtin", "id": map_spec.builtin_id}
    if isinstance(map_spec, AffineMap):
        return {"type": "affine", "matrix": _encode_matrix(map_spec.matrix), "offset": _encode_vector(map_spec.offset)}
    if isinstance(map_spec, CombinationMap):
        comb = map_spec.combination
        data: Dict[str, Any] = {
            "type": "combination",
            "terms": [{"fn": encode_scalar_fn(t.fn), "weight": _encode_vector(t.weight)} for t in comb.terms],
        }
        if comb.order_cone is not None:
            data["order_cone"] = encode_cone(comb.order_cone)
        return data
    raise TypeError(f"cannot serialize {type(map_spec).__name__}")


def serialize_problem(problem: Problem) -> Dict[str, Any]:
    """Problem as a JSON-ready dict; problem_from_dict inverts it exactly"""
    data: Dict[str, Any] = {
        "name": problem.name,
        "p": problem.p,
        "q": problem.q,
        "cone": encode_cone(problem.cone),
        "map": encode_map(problem.map_spec),
    }
    if problem.options is not None:
        data["options"] = {f.name: getattr(problem.options, f.name) for f in fields(SolveOptions)}
    return data


def write_problem(problem: Problem, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(serialize_problem(problem), indent=2) + "\n")
    logger.info(f"Wrote problem '{problem.name}' to {path}")
