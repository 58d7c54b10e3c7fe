"""JSON scenario files: definitions by name, then tasks run in order.

Layout::

    {"version": 1,
     "definitions": {"complexes": {...}, "maps": {...}, "categories": {...},
                     "dg_categories": {...}, "presheaves": {...}, "diagrams": {...},
                     "functors": {...}, "cubes": {...}, "simplicial": {...}},
     "tasks": [{"command": "homology", "complex": "A"}, ...]}

Matrices are row-major integer lists, degrees are explicit string keys and
names are the only cross-references. Object names are strings.
"""

import json
import zlib
from dataclasses import dataclass, field

from . import intmat as im
from .chain import ChainComplex, ChainMap, DirectSum, UnsoundWindow, validate_complex, validate_map
from .enriched import (DgCategory, FiniteCategory, constant_presheaf, corepresentable, diagram_from_functor,
                       direct_sum_presheaf, free_dg_category, full_subcategory_of_ch, representable,
                       shift_presheaf, validate_category, validate_dg_category, validate_presheaf)

VERSION = 1
SECTIONS = ["complexes", "maps", "categories", "dg_categories", "presheaves", "diagrams",
            "functors", "cubes", "simplicial"]


class ScenarioError(ValueError):
    """Parse or reference problem; ``where`` is a dotted field path or a line number."""

    def __init__(self, message, where=None):
        self.where = where
        self.bare = message
        super().__init__(message if where is None else "%s: %s" % (where, message))


class ValidationFailure(ValueError):
    def __init__(self, name, verdict):
        self.name, self.verdict = name, verdict
        super().__init__("%s is invalid: %s" % (name, verdict.message))


# ---------------------------------------------------------------------------
# serialization of basic values


def complex_to_json(C):
    """Ranks as [degree, rank] pairs, differentials as [degree, matrix] pairs."""
    degs = [n for n in sorted(C.ranks) if C.rank(n)]
    return {"ranks": [[n, C.rank(n)] for n in degs],
            "diffs": [[n, im.to_lists(C.d(n))] for n in degs
                      if C.rank(n - 1) and not im.is_zero(C.d(n))]}


def map_components_to_json(f):
    return [[n, im.to_lists(f[n])] for n in f.degrees() if f[n].size and not im.is_zero(f[n])]


def _int_keys(d, where):
    """Accept either {degree: value} or [[degree, value], ...]."""
    out = {}
    if isinstance(d, list):
        try:
            items = [(k, v) for k, v in d]
        except (TypeError, ValueError):
            raise ScenarioError("expected a list of [degree, value] pairs", where)
    elif isinstance(d, dict):
        items = d.items()
    else:
        raise ScenarioError("expected degree-indexed data", where)
    for k, v in items:
        try:
            out[int(k)] = v
        except (TypeError, ValueError):
            raise ScenarioError("degree key %r is not an integer" % (k,), where)
    return out


def _matrix(data, shape, where):
    try:
        return im.asmat(data, shape)
    except Exception as exc:
        raise ScenarioError("bad matrix (%s), expected shape %s" % (exc, shape), where)


def parse_complex(spec, where="complex"):
    if not isinstance(spec, dict) or "ranks" not in spec:
        raise ScenarioError("a complex needs 'ranks'", where)
    ranks = _int_keys(spec["ranks"], where + ".ranks")
    diffs = {}
    for n, M in _int_keys(spec.get("diffs", {}), where + ".diffs").items():
        diffs[n] = _matrix(M, (ranks.get(n - 1, 0), ranks.get(n, 0)), "%s.diffs.%d" % (where, n))
    return ChainComplex(ranks, diffs)


def parse_map(spec, source, target, where="map"):
    comps = {}
    for n, M in _int_keys(spec.get("components", {}), where + ".components").items():
        comps[n] = _matrix(M, (target.rank(n), source.rank(n)), "%s.components.%d" % (where, n))
    return ChainMap(source, target, comps)


def category_to_json(I):
    return {"objects": [str(x) for x in I.objects],
            "morphisms": {str(f): [str(s), str(t)] for f, (s, t) in sorted(I.morphisms.items(), key=lambda kv: str(kv[0]))
                          if not I.is_identity(f)},
            "compose": sorted([[str(g), str(f), str(h)] for (g, f), h in I.table.items()
                               if not I.is_identity(g) and not I.is_identity(f)])}


def parse_category(spec, where="category"):
    if "builtin" in spec:
        kind = spec["builtin"]
        if kind == "span":
            return FiniteCategory.span()
        if kind == "arrow":
            return FiniteCategory.poset(["0", "1"], [("0", "1")])
        if kind == "point":
            return FiniteCategory.discrete(["*"])
        raise ScenarioError("unknown builtin category %r" % (kind,), where)
    if "poset" in spec:
        p = spec["poset"]
        return FiniteCategory.poset([str(x) for x in p["elements"]],
                                    [(str(a), str(b)) for a, b in p.get("relations", [])])
    if "quiver" in spec:
        q = spec["quiver"]
        return FiniteCategory.free_on_quiver([str(x) for x in q["objects"]],
                                             [(str(e), str(s), str(t)) for e, s, t in q.get("edges", [])])
    if "discrete" in spec:
        return FiniteCategory.discrete([str(x) for x in spec["discrete"]])
    if "objects" in spec:
        morph = {str(f): (str(s), str(t)) for f, (s, t) in spec.get("morphisms", {}).items()}
        table = {(str(g), str(f)): str(h) for g, f, h in spec.get("compose", [])}
        return FiniteCategory([str(x) for x in spec["objects"]], morph, table)
    raise ScenarioError("cannot read category", where)


# ---------------------------------------------------------------------------
# scenario loading


@dataclass
class Scenario:
    raw: dict
    seed: int = 0
    values: dict = field(default_factory=dict)      # (section, name) -> object
    order: list = field(default_factory=list)

    def get(self, section, name, where=None):
        key = (section, name)
        if key not in self.values:
            if name not in self.raw.get("definitions", {}).get(section, {}):
                raise ScenarioError("unresolved reference %r in %s" % (name, section), where)
            self._build(section, name)
        return self.values[key]

    def rng(self, name):
        from .corpus import rng_from
        return rng_from([self.seed, zlib.crc32(name.encode())])

    # builders ------------------------------------------------------------
    def _build(self, section, name):
        spec = self.raw["definitions"][section][name]
        where = "definitions.%s.%s" % (section, name)
        if not isinstance(spec, dict):
            raise ScenarioError("definition must be an object", where)
        builder = getattr(self, "_build_" + section)
        self.values[(section, name)] = builder(name, spec, where)
        self.order.append((section, name))

    def _build_complexes(self, name, spec, where):
        from .chain import shift, tensor
        from .corpus import random_complex, elementary_complex
        if "builtin" in spec:
            kind = spec["builtin"]
            if kind == "sphere":
                return ChainComplex.sphere(int(spec.get("degree", 0)), int(spec.get("rank", 1)))
            if kind == "disc":
                return elementary_complex([("d", int(spec.get("degree", 1)), int(spec.get("multiplier", 1)))])
            if kind == "zero":
                return ChainComplex.zero()
            raise ScenarioError("unknown builtin complex %r" % (kind,), where)
        if "random" in spec:
            r = spec["random"] or {}
            return random_complex(self.rng(name), int(r.get("lo", 0)), int(r.get("width", 3)),
                                  int(r.get("max_rank", 3)))
        if "shift" in spec:
            return shift(self.get("complexes", spec["shift"], where), int(spec.get("by", 1)))
        if "tensor" in spec:
            a, b = spec["tensor"]
            return tensor(self.get("complexes", a, where), self.get("complexes", b, where))
        if "sum" in spec:
            from .chain import direct_sum
            return direct_sum([self.get("complexes", x, where) for x in spec["sum"]])
        if "cone" in spec:
            from .chain import mapping_cone
            return mapping_cone(self.get("maps", spec["cone"], where)).complex
        return parse_complex(spec, where)

    def _build_maps(self, name, spec, where):
        A = self.get("complexes", spec.get("source"), where + ".source")
        B = self.get("complexes", spec.get("target"), where + ".target")
        if spec.get("identity"):
            return ChainMap.identity(A)
        return parse_map(spec, A, B, where)

    def _build_categories(self, name, spec, where):
        return parse_category(spec, where)

    def _build_dg_categories(self, name, spec, where):
        if "free" in spec:
            return free_dg_category(self.get("categories", spec["free"], where + ".free"))
        if "complexes" in spec:
            objs = spec["complexes"]
            if isinstance(objs, list):
                objs = {x: x for x in objs}
            return full_subcategory_of_ch({str(k): self.get("complexes", v, where + ".complexes")
                                           for k, v in objs.items()})
        if "random" in spec:
            from .corpus import random_host
            return random_host(self.rng(name), int((spec["random"] or {}).get("max_objects", 3)))
        raise ScenarioError("dg-category needs 'free', 'complexes' or 'random'", where)

    def _host(self, spec, where):
        if "host" not in spec:
            raise ScenarioError("missing 'host'", where)
        return self.get("dg_categories", spec["host"], where + ".host")

    def _build_presheaves(self, name, spec, where):
        if "restrict" in spec:
            from .dwyerkan import restrict
            r = spec["restrict"]
            F = self.get("functors", r["functor"], where + ".restrict.functor")
            return restrict(F, self.get("presheaves", r["weight"], where + ".restrict.weight"))
        if "left_kan" in spec:
            from .dwyerkan import left_kan
            r = spec["left_kan"]
            F = self.get("functors", r["functor"], where + ".left_kan.functor")
            return left_kan(F, self.get("presheaves", r["weight"], where + ".left_kan.weight"))
        if "sum" in spec:
            return direct_sum_presheaf([self.get("presheaves", x, where + ".sum") for x in spec["sum"]])
        if "shift" in spec:
            return shift_presheaf(self.get("presheaves", spec["shift"], where + ".shift"), int(spec.get("by", 1)))
        C = self._host(spec, where)
        if "representable" in spec:
            return representable(C, self._obj(C, spec["representable"], where))
        if spec.get("constant"):
            return constant_presheaf(C)
        if "cells" in spec:
            from .colim import WeightCell
            W = WeightCell(C)
            for k, cell in enumerate(spec["cells"]):
                try:
                    W = W.attach(self._obj(C, cell["object"], where), int(cell["degree"]), cell.get("boundary"))
                except (KeyError, ValueError) as exc:
                    raise ScenarioError(str(exc), "%s.cells.%d" % (where, k))
            return W
        if "random_cell" in spec:
            from .corpus import random_weight_cell
            return random_weight_cell(self.rng(name), C)
        if spec.get("zero"):
            from .enriched import Presheaf
            return Presheaf(C, {})
        raise ScenarioError("cannot read presheaf", where)

    def _build_diagrams(self, name, spec, where):
        if "sum" in spec:
            return direct_sum_presheaf([self.get("diagrams", x, where + ".sum") for x in spec["sum"]])
        if "shift" in spec:
            return shift_presheaf(self.get("diagrams", spec["shift"], where + ".shift"), int(spec.get("by", 1)))
        C = self._host(spec, where)
        if "corepresentable" in spec:
            return corepresentable(C, self._obj(C, spec["corepresentable"], where))
        if "functor" in spec:
            f = spec["functor"]
            vals = {self._obj(C, k, where): self.get("complexes", v, where + ".functor.values")
                    for k, v in f.get("values", {}).items()}
            maps = {str(k): self.get("maps", v, where + ".functor.maps") for k, v in f.get("maps", {}).items()}
            return diagram_from_functor(C, vals, maps)
        if spec.get("evaluation"):
            from .corpus import evaluation_diagram
            return evaluation_diagram(C)
        if "random" in spec:
            from .corpus import random_diagram
            return random_diagram(self.rng(name), C)
        raise ScenarioError("cannot read diagram", where)

    def _build_functors(self, name, spec, where):
        from .dwyerkan import DgFunctor
        D = self.get("dg_categories", spec.get("source"), where + ".source")
        C = self.get("dg_categories", spec.get("target"), where + ".target")
        objs = {self._obj(D, k, where): self._obj(C, v, where) for k, v in spec.get("objects", {}).items()}
        base = DgFunctor.inclusion(D, C, objs or None)
        if spec.get("inclusion"):
            return base
        # unlisted hom components default to the identity matrices of an inclusion
        homs = dict(base._homs)
        for k, entry in enumerate(spec.get("homs", [])):
            x, y = (self._obj(D, o, where) for o in entry["pair"])
            S, T = D.hom(x, y), C.hom(objs[x], objs[y])
            homs[(x, y)] = parse_map(entry, S, T, "%s.homs.%d" % (where, k))
        return DgFunctor(D, C, objs, homs)

    def _build_cubes(self, name, spec, where):
        from .colim import CubicalDiagram, cube_tensor
        if "arrow" in spec:
            return CubicalDiagram.arrow(self.get("maps", spec["arrow"], where + ".arrow"), spec.get("index", name))
        if "tensor" in spec:
            a, b = spec["tensor"]
            return cube_tensor(self.get("cubes", a, where), self.get("cubes", b, where))
        raise ScenarioError("cube needs 'arrow' or 'tensor'", where)

    def _build_simplicial(self, name, spec, where):
        from .simplicial import constant, dold_kan_gamma
        from .colim import bar_construction, bar_resolution
        N = int(spec.get("N", 2))
        if "gamma" in spec:
            return dold_kan_gamma(self.get("complexes", spec["gamma"], where + ".gamma"), N)
        if "constant" in spec:
            return constant(self.get("complexes", spec["constant"], where + ".constant"), N)
        if "bar" in spec:
            b = spec["bar"]
            return bar_construction(self.get("presheaves", b["weight"], where + ".bar.weight"),
                                    self.get("diagrams", b["diagram"], where + ".bar.diagram"), N)
        if "bar_resolution" in spec:
            b = spec["bar_resolution"]
            W = self.get("presheaves", b["weight"], where + ".bar_resolution.weight")
            return bar_resolution(W, self._obj(W.host, b["object"], where), N)
        if "scaled_unit_bar" in spec:
            from .corpus import scaled_unit_bar
            return scaled_unit_bar(N, int((spec["scaled_unit_bar"] or {}).get("factor", 2)))
        raise ScenarioError("cannot read simplicial object", where)

    @staticmethod
    def _obj(C, x, where):
        for o in C.objects:
            if str(o) == str(x):
                return o
        raise ScenarioError("unknown object %r" % (x,), where)


def load(text, seed=0):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("JSON parse error: %s" % exc.msg, "line %d column %d" % (exc.lineno, exc.colno))
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object", "top level")
    if raw.get("version", VERSION) != VERSION:
        raise ScenarioError("unsupported version %r" % (raw.get("version"),), "version")
    defs = raw.setdefault("definitions", {})
    for sec in defs:
        if sec not in SECTIONS:
            raise ScenarioError("unknown section %r" % (sec,), "definitions")
    if not isinstance(raw.setdefault("tasks", []), list):
        raise ScenarioError("tasks must be a list", "tasks")
    return Scenario(raw, seed)


VALIDATORS = {
    "complexes": validate_complex,
    "maps": validate_map,
    "categories": validate_category,
    "dg_categories": validate_dg_category,
    "presheaves": validate_presheaf,
    "diagrams": validate_presheaf,
}


def build_all(sc):
    """Build and validate every definition in declaration order."""
    from .dwyerkan import validate_functor
    from .simplicial import validate_simplicial
    from .colim import validate_cube
    extra = {"functors": validate_functor, "cubes": validate_cube, "simplicial": validate_simplicial}
    for sec in SECTIONS:
        for name in sc.raw["definitions"].get(sec, {}):
            val = sc.get(sec, name)
            check = VALIDATORS.get(sec) or extra.get(sec)
            if getattr(val, "unchecked", None):
                continue
            v = check(val)
            if not v:
                raise ValidationFailure("%s.%s" % (sec, name), v)


TASK_REFS = {"complex": "complexes", "weight": "presheaves", "diagram": "diagrams", "functor": "functors",
             "cube": "cubes", "simplicial": "simplicial", "composition": "maps"}


def check_task_refs(sc):
    """Every name a task mentions must be defined; raises ScenarioError otherwise."""
    defs = sc.raw["definitions"]
    for i, task in enumerate(sc.raw["tasks"]):
        if not isinstance(task, dict):
            raise ScenarioError("task must be an object", "tasks.%d" % i)
        for key, sec in TASK_REFS.items():
            if key not in task:
                continue
            names = task[key] if isinstance(task[key], list) else [task[key]]
            for n in names:
                if n not in defs.get(sec, {}):
                    raise ScenarioError("unresolved reference %r in %s" % (n, sec), "tasks.%d.%s" % (i, key))
