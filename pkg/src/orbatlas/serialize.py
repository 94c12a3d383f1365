"""Canonical JSON serialization for atlases, groupoid presentations, compatible
systems, 2-cells and witness files.

Rationals travel as "p/q" strings and field elements as length-m coefficient
arrays; documents are emitted with sorted keys and no whitespace, so
parse -> serialize -> parse is the identity and serialization after parsing is
byte-identical to the canonical form.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .atlas import Atlas, Chart, Embedding, Span
from .errors import ParseError
from .field import CycNum
from .gallery import WitnessSpan
from .geometry import AffineMap, Ball, Point, PolyMap
from .groupoids import ActionGroupoid, GroupoidPresentation
from .oracles import PushforwardOracle, SpanSearchOracle, SpanTableOracle
from .systems import CompatibleSystem, OrbNatTrans
from .translation import TranslationGroupoid


# -- scalars -----------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s, where="rational") -> Fraction:
    try:
        f = Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {s!r}", where) from exc
    return f


def cyc_to_doc(x: CycNum) -> list[str]:
    return [_frac_str(c) for c in x.coeffs]


def cyc_from_doc(m: int, doc, where="scalar") -> CycNum:
    if isinstance(doc, str):
        return CycNum.rational(m, _parse_frac(doc, where))
    if not isinstance(doc, list):
        raise ParseError("expected coefficient array", where)
    return CycNum(m, [_parse_frac(c, where) for c in doc])


def point_to_doc(p: Point) -> list:
    return [cyc_to_doc(c) for c in p.coords]


def point_from_doc(m: int, doc, where="point") -> Point:
    return Point(tuple(cyc_from_doc(m, c, where) for c in doc))


def affine_to_doc(f: AffineMap) -> dict:
    return {
        "A": [[cyc_to_doc(c) for c in row] for row in f.a],
        "b": point_to_doc(f.b),
    }


def affine_from_doc(m: int, doc, where="map") -> AffineMap:
    try:
        a = tuple(
            tuple(cyc_from_doc(m, c, where) for c in row) for row in doc["A"]
        )
        b = point_from_doc(m, doc["b"], where)
    except (KeyError, TypeError) as exc:
        raise ParseError("malformed affine map", where) from exc
    return AffineMap(a, b)


def poly_to_doc(p: PolyMap) -> dict:
    coords = []
    for poly in p.coords:
        coords.append(
            [
                {"exps": list(e), "coeff": cyc_to_doc(c)}
                for e, c in sorted(poly.items())
            ]
        )
    return {"dim_in": p.dim_in, "dim_out": p.dim_out, "coords": coords}


def poly_from_doc(m: int, doc, where="lift") -> PolyMap:
    try:
        coords = []
        for poly in doc["coords"]:
            coords.append(
                {tuple(t["exps"]): cyc_from_doc(m, t["coeff"], where) for t in poly}
            )
        return PolyMap(m, doc["dim_in"], doc["dim_out"], coords)
    except (KeyError, TypeError) as exc:
        raise ParseError("malformed polynomial map", where) from exc


# -- atlases -----------------------------------------------------------------


def _radius_to_doc(r2: CycNum):
    return _frac_str(r2.as_rational()) if r2.is_rational() else cyc_to_doc(r2)


def chart_to_doc(c: Chart) -> dict:
    return {
        "id": c.cid,
        "center": point_to_doc(c.ball.center),
        "radius2": _radius_to_doc(c.ball.r2),
        "group": [affine_to_doc(g) for g in c.group],
    }


def chart_from_doc(m: int, doc) -> Chart:
    try:
        cid = doc["id"]
        center = point_from_doc(m, doc["center"], f"chart {cid}")
        r2 = cyc_from_doc(m, doc["radius2"], f"chart {cid} radius")
        group = tuple(affine_from_doc(m, g, f"chart {cid} group") for g in doc["group"])
    except KeyError as exc:
        raise ParseError(f"chart missing field {exc}") from exc
    return Chart(cid, Ball(center, r2), group)


def span_to_doc(s: Span) -> dict:
    return {
        "chart": s.chart,
        "point": point_to_doc(s.point),
        "left": {"dst": s.left.dst, **affine_to_doc(s.left.map)},
        "right": {"dst": s.right.dst, **affine_to_doc(s.right.map)},
    }


def span_from_doc(m: int, doc) -> Span:
    try:
        chart = doc["chart"]
        point = point_from_doc(m, doc["point"], "witness point")
        left = Embedding(chart, doc["left"]["dst"], affine_from_doc(m, doc["left"], "witness leg"))
        right = Embedding(chart, doc["right"]["dst"], affine_from_doc(m, doc["right"], "witness leg"))
    except KeyError as exc:
        raise ParseError(f"witness missing field {exc}") from exc
    return Span(chart, point, left, right)


def oracle_to_doc(oracle) -> dict:
    if isinstance(oracle, PushforwardOracle):
        return {
            "kind": "pushforward",
            "params": {"relabel": dict(sorted(oracle.relabel.items())), "inner": oracle_to_doc(oracle.inner)},
        }
    if isinstance(oracle, SpanTableOracle):
        return {"kind": "span_table", "params": {"spans": [span_to_doc(s) for s in oracle.entries]}}
    if isinstance(oracle, SpanSearchOracle):
        return {"kind": "span_search", "params": {}}
    raise ParseError(f"unserializable oracle {type(oracle).__name__}")


def oracle_from_doc(m: int, doc):
    kind = doc.get("kind", "span_search")
    params = doc.get("params", {})
    if kind in ("span_search", "global_quotient", "gluing"):
        return SpanSearchOracle()
    if kind == "span_table":
        return SpanTableOracle(tuple(span_from_doc(m, s) for s in params.get("spans", ())))
    if kind == "pushforward":
        return PushforwardOracle(oracle_from_doc(m, params["inner"]), params.get("relabel", {}))
    raise ParseError(f"unknown oracle kind {kind!r}")


def atlas_to_doc(atlas: Atlas) -> dict:
    return {
        "kind": "atlas",
        "conductor": atlas.conductor,
        "dimension": atlas.dim,
        "charts": [chart_to_doc(c) for c in atlas.charts.values()],
        "embeddings": [
            {"src": e.src, "dst": e.dst, **affine_to_doc(e.map)}
            for (_, _), e in sorted(atlas.reps.items())
        ],
        "oracle": oracle_to_doc(atlas.oracle),
        "witnesses": [span_to_doc(w) for w in atlas.witnesses],
        "unit_points": {
            cid: [point_to_doc(p) for p in pts]
            for cid, pts in sorted(atlas.unit_points.items())
            if pts
        },
    }


def atlas_from_doc(doc) -> Atlas:
    if doc.get("kind") != "atlas":
        raise ParseError("document is not an atlas")
    try:
        m = int(doc["conductor"])
        dim = int(doc["dimension"])
        charts = [chart_from_doc(m, c) for c in doc["charts"]]
        reps = [
            Embedding(e["src"], e["dst"], affine_from_doc(m, e, "embedding"))
            for e in doc.get("embeddings", [])
        ]
        oracle = oracle_from_doc(m, doc.get("oracle", {}))
        witnesses = [span_from_doc(m, w) for w in doc.get("witnesses", [])]
        unit_points = {
            cid: tuple(point_from_doc(m, p, "unit point") for p in pts)
            for cid, pts in doc.get("unit_points", {}).items()
        }
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed atlas document: {exc}") from exc
    return Atlas(m, dim, charts, reps, oracle, witnesses=witnesses, unit_points=unit_points)


# -- groupoid presentations ------------------------------------------------------


def groupoid_to_doc(g: GroupoidPresentation) -> dict:
    if isinstance(g, TranslationGroupoid):
        atlas_doc = atlas_to_doc(g.atlas)
        return {
            "kind": "groupoid",
            "strategy": "translation",
            "atlas": atlas_doc,
            "atlas_hash": doc_hash(atlas_doc),
            "components": [
                {
                    "chart": lab[0],
                    "left": list(lab[1]),
                    "right": list(lab[2]),
                }
                for lab in sorted(c.label for c in g.arrow_components())
            ],
        }
    if isinstance(g, ActionGroupoid):
        return {
            "kind": "groupoid",
            "strategy": "action",
            "conductor": g.conductor,
            "ball": {"center": point_to_doc(g.ball.center), "radius2": _radius_to_doc(g.ball.r2)},
            "elements": [{"label": lab, **affine_to_doc(g.rep[lab])} for lab in g.labels],
            "mult": {f"{a}|{b}": c for (a, b), c in sorted(g.mult.items())},
            "inv": dict(sorted(g.inv_table.items())),
        }
    raise ParseError(f"unserializable groupoid strategy {g.strategy!r}")


def groupoid_from_doc(doc) -> GroupoidPresentation:
    if doc.get("kind") != "groupoid":
        raise ParseError("document is not a groupoid presentation")
    strategy = doc.get("strategy")
    if strategy == "translation":
        atlas_doc = doc["atlas"]
        want = doc.get("atlas_hash")
        if want is not None and doc_hash(atlas_doc) != want:
            raise ParseError("atlas hash mismatch in groupoid document")
        g = TranslationGroupoid(atlas_from_doc(atlas_doc))
        stated = doc.get("components")
        if stated is not None:
            actual = sorted(c.label for c in g.arrow_components())
            listed = [(c["chart"], tuple(c["left"]), tuple(c["right"])) for c in stated]
            if listed != actual:
                raise ParseError("component table does not match the atlas")
        return g
    if strategy == "action":
        m = int(doc["conductor"])
        ball = Ball(
            point_from_doc(m, doc["ball"]["center"], "ball"),
            cyc_from_doc(m, doc["ball"]["radius2"], "ball radius"),
        )
        elements = [
            (e["label"], affine_from_doc(m, e, "element")) for e in doc["elements"]
        ]
        mult = {}
        for key, val in doc["mult"].items():
            a, b = key.split("|")
            mult[(a, b)] = val
        return ActionGroupoid(m, ball, elements, mult=mult, inv=dict(doc["inv"]))
    raise ParseError(f"unknown groupoid strategy {strategy!r}")


# -- compatible systems and 2-cells -------------------------------------------------


def system_to_doc(f: CompatibleSystem) -> dict:
    src_doc, dst_doc = atlas_to_doc(f.src), atlas_to_doc(f.dst)
    return {
        "kind": "system",
        "src": {"inline": src_doc, "hash": doc_hash(src_doc)},
        "dst": {"inline": dst_doc, "hash": doc_hash(dst_doc)},
        "theta": dict(sorted(f.theta.items())),
        "assignment": [
            {"pair": [i, j], "dst_pair": [e.src, e.dst], **affine_to_doc(e.map)}
            for (i, j), e in sorted(f.assign.items())
        ],
        "lifts": {cid: poly_to_doc(p) for cid, p in sorted(f.lifts.items())},
    }


def _atlas_ref_from_doc(ref, base_dir: Path | None):
    if "inline" in ref:
        doc = ref["inline"]
    elif "path" in ref:
        if base_dir is None:
            raise ParseError("atlas reference by path needs a base directory")
        doc = json.loads((base_dir / ref["path"]).read_bytes())
    else:
        raise ParseError("atlas reference needs 'inline' or 'path'")
    if "hash" in ref and doc_hash(doc) != ref["hash"]:
        raise ParseError("atlas reference hash mismatch")
    return atlas_from_doc(doc)


def system_from_doc(doc, base_dir: Path | None = None) -> CompatibleSystem:
    if doc.get("kind") != "system":
        raise ParseError("document is not a compatible system")
    src = _atlas_ref_from_doc(doc["src"], base_dir)
    dst = _atlas_ref_from_doc(doc["dst"], base_dir)
    m = dst.conductor
    assign = {}
    for entry in doc.get("assignment", []):
        i, j = entry["pair"]
        ti, tj = entry["dst_pair"]
        assign[(i, j)] = Embedding(ti, tj, affine_from_doc(m, entry, "assignment"))
    lifts = {cid: poly_from_doc(m, p) for cid, p in doc["lifts"].items()}
    return CompatibleSystem(src, dst, doc["theta"], assign, lifts)


def cell_to_doc(delta: OrbNatTrans) -> dict:
    return {
        "kind": "cell",
        "src_system": system_to_doc(delta.src_sys),
        "dst_system": system_to_doc(delta.dst_sys),
        "components": {
            cid: {"src": e.src, "dst": e.dst, **affine_to_doc(e.map)}
            for cid, e in sorted(delta.components.items())
        },
    }


def cell_from_doc(doc, base_dir: Path | None = None) -> OrbNatTrans:
    if doc.get("kind") != "cell":
        raise ParseError("document is not a 2-cell")
    f1 = system_from_doc(doc["src_system"], base_dir)
    f2 = system_from_doc(doc["dst_system"], base_dir)
    m = f1.dst.conductor
    comps = {
        cid: Embedding(e["src"], e["dst"], affine_from_doc(m, e, "component"))
        for cid, e in doc["components"].items()
    }
    return OrbNatTrans(f1, f2, comps)


def witnesses_to_doc(witnesses) -> dict:
    return {
        "kind": "witnesses",
        "spans": [
            {
                "chart": chart_to_doc(w.chart),
                "left": {"dst": w.left.dst, **affine_to_doc(w.left.map)},
                "right": {"dst": w.right.dst, **affine_to_doc(w.right.map)},
            }
            for w in witnesses
        ],
    }


def witnesses_from_doc(doc, m: int) -> list[WitnessSpan]:
    if doc.get("kind") != "witnesses":
        raise ParseError("document is not a witness file")
    out = []
    for entry in doc["spans"]:
        chart = chart_from_doc(m, entry["chart"])
        left = Embedding(chart.cid, entry["left"]["dst"], affine_from_doc(m, entry["left"], "leg"))
        right = Embedding(chart.cid, entry["right"]["dst"], affine_from_doc(m, entry["right"], "leg"))
        out.append(WitnessSpan(chart, left, right))
    return out


# -- canonical bytes -----------------------------------------------------------------


def canonical_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


def doc_hash(doc: dict) -> str:
    return hashlib.sha256(canonical_bytes(doc)).hexdigest()


def serialize(obj) -> bytes:
    if isinstance(obj, Atlas):
        return canonical_bytes(atlas_to_doc(obj))
    if isinstance(obj, GroupoidPresentation):
        return canonical_bytes(groupoid_to_doc(obj))
    if isinstance(obj, CompatibleSystem):
        return canonical_bytes(system_to_doc(obj))
    if isinstance(obj, OrbNatTrans):
        return canonical_bytes(cell_to_doc(obj))
    if isinstance(obj, dict):
        return canonical_bytes(obj)
    raise ParseError(f"no serialization for {type(obj).__name__}")


def load_document(path) -> dict:
    try:
        return json.loads(Path(path).read_bytes())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def parse_atlas(path) -> Atlas:
    return atlas_from_doc(load_document(path))


def parse_any(path, base_dir: Path | None = None):
    doc = load_document(path)
    kind = doc.get("kind")
    base = base_dir if base_dir is not None else Path(path).parent
    if kind == "atlas":
        return atlas_from_doc(doc)
    if kind == "groupoid":
        return groupoid_from_doc(doc)
    if kind == "system":
        return system_from_doc(doc, base)
    if kind == "cell":
        return cell_from_doc(doc, base)
    raise ParseError(f"unknown document kind {kind!r}")
