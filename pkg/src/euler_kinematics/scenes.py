"""Scene files: JSON descriptions of the objects a run operates on.

Exact coordinates travel as strings ("3", "-1/2"); JSON numbers are read as
floats.  Floats are written with 17 significant digits so every value
survives a write/parse round trip.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import json
import re

from .cf import PolytopeCombination, StratifiedCF, build_complex
from .errors import ParseError, ValidationError
from .ops import AffineMap
from .polytope import ConvexPolytope
from .sphere3 import BallCF, GeodesicBall, UnitQuaternion

SCHEMA = "euler-kinematics/v1"
SPHERE3 = "sphere3"
EUCLIDEAN = "euclidean"

_FLOAT_MARK = "@@f17:"
_FLOAT_RE = re.compile(r'"' + re.escape(_FLOAT_MARK) + r'([^"]*)"')


def fmt_float(x):
    return format(float(x), ".17g")


def _mark_floats(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            return str(obj)
        return _FLOAT_MARK + fmt_float(obj)
    if isinstance(obj, dict):
        return {k: _mark_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark_floats(v) for v in obj]
    return obj


def dumps(obj):
    """json.dumps with floats at 17 significant digits and sorted, stable layout."""
    text = json.dumps(_mark_floats(obj), indent=2, sort_keys=True, ensure_ascii=False)
    return _FLOAT_RE.sub(lambda m: m.group(1), text) + "\n"


@dataclass
class Scene:
    space: str
    dim: int
    objects: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, obj in self.objects.items():
            _check_space(self, name, obj)

    def __eq__(self, other):
        return isinstance(other, Scene) and scene_to_dict(self) == scene_to_dict(other)


def _check_space(scene, name, obj):
    if scene.space == SPHERE3:
        if not isinstance(obj, BallCF):
            raise ValidationError(f"object {name!r} is not a ball combination", name)
        return
    if isinstance(obj, BallCF):
        raise ValidationError(f"object {name!r} lives on the sphere", name)
    d = obj.ambient_dim
    if d is not None and d != scene.dim:
        raise ValidationError(f"object {name!r} lives in R^{d}, scene is R^{scene.dim}", name)


# -- decoding -------------------------------------------------------------------------

def _scalar(v, where):
    if isinstance(v, bool):
        raise ValidationError(f"{where}: booleans are not coordinates", where)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"{where}: bad rational {v!r}", where) from e
    raise ValidationError(f"{where}: expected a number or 'p/q' string", where)


def _points(rows, dim, where):
    if not isinstance(rows, list):
        raise ValidationError(f"{where}: expected a list of points", where)
    out = []
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ValidationError(f"{where}: point {j} does not have {dim} coordinates", where)
        out.append(tuple(_scalar(c, where) for c in row))
    return out


def _weight(v, where):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(f"{where}: weights must be integers", where)
    return v


def _decode_object(name, entry, scene_space, dim):
    if not isinstance(entry, dict) or len(entry) != 1:
        raise ValidationError(f"object {name!r} needs exactly one of cf, polytopes, balls", name)
    kind, body = next(iter(entry.items()))
    if kind == "cf":
        verts = _points(body.get("vertices", []), dim, name)
        simplices, weights = [], {}
        for item in body.get("simplices", []):
            s = tuple(item["v"])
            simplices.append(s)
            w = _weight(item.get("w", 0), name)
            if w:
                weights[tuple(sorted(s))] = w
        try:
            cx = build_complex(dim, verts, simplices)
        except ValidationError as e:
            raise type(e)(f"object {name!r}: {e}", name) from e
        return StratifiedCF(cx, weights)
    if kind == "polytopes":
        terms = []
        for item in body:
            pts = _points(item["vertices"], dim, name)
            if not pts:
                raise ValidationError(f"object {name!r}: empty polytope", name)
            terms.append((_weight(item.get("w", 1), name), ConvexPolytope(pts)))
        return PolytopeCombination(terms, dim)
    if kind == "balls":
        if scene_space != SPHERE3:
            raise ValidationError(f"object {name!r}: balls need the sphere3 space", name)
        terms = []
        for item in body:
            c = item["c"]
            if not isinstance(c, list) or len(c) != 4:
                raise ValidationError(f"object {name!r}: a center needs 4 components", name)
            terms.append((_weight(item.get("w", 1), name),
                          GeodesicBall(UnitQuaternion(*map(float, c)), float(item["r"]))))
        return BallCF(terms)
    raise ValidationError(f"object {name!r}: unknown kind {kind!r}", name)


def _decode_map(name, entry, dim):
    lin = [[_scalar(c, name) for c in row] for row in entry["linear"]]
    t = entry.get("translation")
    t = None if t is None else [_scalar(c, name) for c in t]
    f = AffineMap(lin, t, source_dim=entry.get("source_dim", dim))
    if f.source_dim != dim:
        raise ValidationError(f"map {name!r} does not start in R^{dim}", name)
    return f


def scene_from_dict(data):
    if not isinstance(data, dict):
        raise ValidationError("scene must be a JSON object")
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ValidationError(f"unsupported schema {schema!r}")
    space = data.get("space")
    if space == SPHERE3:
        kind, dim = SPHERE3, 3
    elif isinstance(space, dict) and set(space) == {EUCLIDEAN}:
        kind, dim = EUCLIDEAN, space[EUCLIDEAN]
        if isinstance(dim, bool) or not isinstance(dim, int) or not 0 <= dim <= 3:
            raise ValidationError("euclidean dimension must be 0..3")
    else:
        raise ValidationError(f"unknown space {space!r}")
    try:
        objects = {n: _decode_object(n, s, kind, dim) for n, s in data.get("objects", {}).items()}
        maps = {n: _decode_map(n, s, dim) for n, s in data.get("maps", {}).items()}
    except (KeyError, TypeError) as e:
        raise ValidationError(f"malformed scene entry: {e}") from e
    meta = data.get("metadata", {})
    if not all(isinstance(v, str) for v in meta.values()):
        raise ValidationError("metadata values must be strings")
    return Scene(kind, dim, objects, maps, dict(meta))


def parse_scene_text(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno) from e
    return scene_from_dict(data)


def parse_scene(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"not UTF-8: {e.reason}") from e
    return parse_scene_text(text)


# -- encoding ---------------------------------------------------------------------------

def encode_scalar(c):
    if isinstance(c, Fraction):
        return str(c)
    return float(c)


def _encode_points(pts):
    return [[encode_scalar(c) for c in p] for p in pts]


def encode_object(obj):
    if isinstance(obj, StratifiedCF):
        cx = obj.complex
        return {"cf": {
            "vertices": _encode_points(cx.vertices),
            "simplices": [{"v": list(s), "w": int(obj.weights.get(s, 0))} for s in sorted(cx.simplices)],
        }}
    if isinstance(obj, PolytopeCombination):
        return {"polytopes": [{"w": int(m), "vertices": _encode_points(P.vertices)}
                              for m, P in obj.terms]}
    if isinstance(obj, BallCF):
        return {"balls": [{"c": [float(v) for v in b.center.array()], "r": float(b.radius),
                           "w": int(w)} for w, b in obj.terms]}
    raise ValidationError(f"cannot serialise {type(obj).__name__}")


def _encode_map(f):
    return {"linear": [[encode_scalar(c) for c in row] for row in f.linear],
            "translation": [encode_scalar(c) for c in f.translation],
            "source_dim": f.source_dim}


def scene_to_dict(scene):
    space = SPHERE3 if scene.space == SPHERE3 else {EUCLIDEAN: scene.dim}
    out = {"schema": SCHEMA, "space": space,
           "objects": {n: encode_object(o) for n, o in scene.objects.items()}}
    if scene.maps:
        out["maps"] = {n: _encode_map(f) for n, f in scene.maps.items()}
    if scene.metadata:
        out["metadata"] = dict(scene.metadata)
    return out


def write_scene(scene, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(scene_to_dict(scene)))
