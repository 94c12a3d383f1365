"""Charts, embeddings and atlases, with the span machinery that identifies
points across charts.

A chart is an open ball together with a finite faithful group of exact
isometries preserving it.  Embeddings between charts are injective similarity
maps; for a stored representative lambda the full set of embeddings between two
charts is the finite torsor {h . lambda : h in the target group}, which is how
an atlas keeps "all possible embeddings" in finite storage.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InvalidAtlasError,
    NoConjugatorError,
    NotUniqueError,
    OracleRefusedError,
    PointOutsideDomainError,
)
from .field import CycNum, sign_real
from .geometry import (
    AffineMap,
    Ball,
    Point,
    ball_in_ball,
    balls_disjoint,
    balls_equal,
    dist2,
    map_ball,
    point_in_ball,
)
from .report import Report


@dataclass(frozen=True)
class Chart:
    """Uniformizing system: ball domain plus a finite group of exact isometries."""

    cid: str
    ball: Ball
    group: tuple[AffineMap, ...]

    @property
    def dim(self) -> int:
        return self.ball.dim

    def identity(self) -> AffineMap:
        for g in self.group:
            if g.is_identity():
                return g
        raise InvalidAtlasError(f"chart {self.cid} has no identity element")

    def __repr__(self):
        return f"Chart({self.cid!r}, |G|={len(self.group)})"


@dataclass(frozen=True)
class Embedding:
    """A similarity embedding of one chart into another."""

    src: str
    dst: str
    map: AffineMap

    def __call__(self, p: Point) -> Point:
        return self.map(p)

    def __repr__(self):
        return f"Embedding({self.src}->{self.dst})"


@dataclass(frozen=True)
class Span:
    """A chart embedded into two charts, with a marked point.

    left : chart -> i  and  right : chart -> j, with left(point) and
    right(point) the identified pair.  Used both as oracle answer and as a
    stored coverage witness.
    """

    chart: str
    point: Point
    left: Embedding
    right: Embedding


class Atlas:
    """A finite family of charts with stored representative embeddings,
    a refinement oracle, coverage witnesses and declared unit witness points."""

    def __init__(
        self,
        conductor: int,
        dim: int,
        charts,
        reps,
        oracle,
        witnesses=(),
        unit_points=None,
    ):
        self.conductor = conductor
        self.dim = dim
        self.charts: dict[str, Chart] = {c.cid: c for c in sorted(charts, key=lambda c: c.cid)}
        self.reps: dict[tuple[str, str], Embedding] = {}
        for e in reps:
            key = (e.src, e.dst)
            if e.src == e.dst:
                raise InvalidAtlasError("self representatives are implicit (the chart group)")
            if key in self.reps:
                raise InvalidAtlasError(f"duplicate representative for {key}")
            self.reps[key] = e
        self.oracle = oracle
        self.witnesses: tuple[Span, ...] = tuple(witnesses)
        self.unit_points: dict[str, tuple[Point, ...]] = {
            cid: tuple((unit_points or {}).get(cid, ())) for cid in self.charts
        }
        self._family_cache: dict[tuple[str, str], tuple[Embedding, ...]] = {}

    # -- chart and embedding enumeration ------------------------------------

    def chart_ids(self) -> list[str]:
        return list(self.charts)

    def chart(self, cid: str) -> Chart:
        return self.charts[cid]

    def identity_embedding(self, cid: str) -> Embedding:
        return Embedding(cid, cid, self.charts[cid].identity())

    def family(self, src: str, dst: str) -> tuple[Embedding, ...]:
        """All embeddings src -> dst: the target-group torsor over the stored
        representative, or the chart group itself when src == dst."""
        key = (src, dst)
        cached = self._family_cache.get(key)
        if cached is not None:
            return cached
        if src == dst:
            fam = tuple(Embedding(src, dst, g) for g in self.charts[src].group)
        elif key in self.reps:
            rep = self.reps[key]
            fam = tuple(
                Embedding(src, dst, h.compose(rep.map)) for h in self.charts[dst].group
            )
        else:
            fam = ()
        self._family_cache[key] = fam
        return fam

    def family_from(self, src: str) -> list[Embedding]:
        out = []
        for dst in self.charts:
            out.extend(self.family(src, dst))
        return out

    def in_family(self, e: Embedding) -> bool:
        return any(f.map == e.map for f in self.family(e.src, e.dst))

    def family_index(self, e: Embedding) -> int:
        for k, f in enumerate(self.family(e.src, e.dst)):
            if f.map == e.map:
                return k
        raise InvalidAtlasError(f"{e!r} is not a stored embedding of the atlas")

    # -- identification -----------------------------------------------------

    def refine(self, ci: str, x: Point, cj: str, y: Point) -> Span | None:
        return self.oracle.refine(self, ci, x, cj, y)

    def locate(self, ci: str, x: Point, cj: str) -> Point | None:
        return self.oracle.locate(self, ci, x, cj)

    def witness_points(self, cid: str) -> list[Point]:
        """Declared unit witness points of a chart, always including the center."""
        pts = [self.charts[cid].ball.center]
        for p in self.unit_points.get(cid, ()):
            if p not in pts:
                pts.append(p)
        return pts


# -- chart-level operations ---------------------------------------------------


def validate_chart(chart: Chart) -> Report:
    """Check the uniformizing-system invariants; report-valued."""
    rep = Report(f"chart {chart.cid}")
    g = chart.group
    rep.add("nonempty group", len(g) > 0)
    if not g:
        return rep
    dim = chart.dim
    rep.add("dimensions agree", all(x.dim == dim for x in g))
    if dim > 0:
        rep.add("positive radius", sign_real(chart.ball.r2) > 0)
    has_id = any(x.is_identity() for x in g)
    rep.add("contains identity", has_id)
    dup = [
        (i, j)
        for i in range(len(g))
        for j in range(i + 1, len(g))
        if g[i] == g[j]
    ]
    rep.add("faithful (no duplicate maps)", not dup, f"duplicates {dup}" if dup else "")
    for x in g:
        ok = balls_equal(map_ball(x, chart.ball), chart.ball)
        if not ok:
            rep.add("domain preserved", False, f"{x!r} does not map the ball onto itself")
            break
    else:
        rep.add("domain preserved", True)
    closed = True
    detail = ""
    for x in g:
        if not x.is_invertible() or not any(x.inverse() == y for y in g):
            closed, detail = False, "missing inverse"
            break
        for y in g:
            if not any(x.compose(y) == z for z in g):
                closed, detail = False, "missing composite"
                break
        if not closed:
            break
    rep.add("closed under composition and inverse", closed, detail)
    return rep


def stabilizer(chart: Chart, x: Point) -> list[AffineMap]:
    if not point_in_ball(x, chart.ball):
        raise PointOutsideDomainError(f"{x!r} outside chart {chart.cid}")
    return [g for g in chart.group if g(x) == x]


def has_trivial_stabilizer(chart: Chart, x: Point) -> bool:
    return len(stabilizer(chart, x)) == 1


def validate_embedding(e: Embedding, atlas: Atlas) -> Report:
    src = atlas.chart(e.src)
    dst = atlas.chart(e.dst)
    rep = Report(f"embedding {e.src}->{e.dst}")
    rep.add("injective", e.map.is_invertible())
    rep.add(
        "image inside target domain",
        ball_in_ball(map_ball(e.map, src.ball), dst.ball),
    )
    missing = []
    for g in src.group:
        lhs = e.map.compose(g)
        if not any(h.compose(e.map) == lhs for h in dst.group):
            missing.append(repr(g))
    rep.add(
        "equivariance witness for every group element",
        not missing,
        f"no target element matches {missing}" if missing else "",
    )
    return rep


def find_conjugator(dst_chart: Chart, lam: AffineMap, mu: AffineMap) -> AffineMap:
    """The unique h in the target group with mu = h . lam."""
    found = [h for h in dst_chart.group if h.compose(lam) == mu]
    if not found:
        raise NoConjugatorError(
            f"no element of G_{dst_chart.cid} carries the first map to the second"
        )
    if len(found) > 1:
        raise NotUniqueError(f"{len(found)} conjugators found; chart is not reduced")
    return found[0]


def induced_homomorphism(e: Embedding, atlas: Atlas) -> dict[AffineMap, AffineMap]:
    """g -> the unique h with e.map . g = h . e.map, for every g in the source group."""
    src = atlas.chart(e.src)
    dst = atlas.chart(e.dst)
    table = {}
    for g in src.group:
        table[g] = find_conjugator(dst, e.map, e.map.compose(g))
    return table


def overlap_transport(e: Embedding, h: AffineMap, atlas: Atlas) -> AffineMap | None:
    """If h moves the image ball off itself return None (exact disjointness);
    otherwise return the unique source element g with e.map . g = h . e.map."""
    src = atlas.chart(e.src)
    image = map_ball(e.map, src.ball)
    if balls_disjoint(map_ball(h, image), image):
        return None
    for g in src.group:
        if e.map.compose(g) == h.compose(e.map):
            return g
    raise InvalidAtlasError(
        f"{h!r} meets the image of {e!r} but is not induced by the source group"
    )


def _short_hash(*parts: str) -> str:
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:8]


def restrict_chart(
    chart: Chart, x: Point, r2: Fraction, cid: str | None = None
) -> tuple[Chart, Embedding]:
    """Sub-chart at x: the stabilizer acting on a ball that its other group
    translates miss entirely.  The radius is halved until both conditions hold."""
    stab = stabilizer(chart, x)
    r2 = Fraction(r2)
    m = chart.ball.r2.m
    displaced = [dist2(g(x), x) for g in chart.group if g not in stab]

    def fits(r2val: Fraction) -> bool:
        ball = Ball(x, CycNum.rational(m, r2val))
        if not ball_in_ball(ball, chart.ball):
            return False
        # g(B) and B disjoint for g outside the stabilizer: |g(x)-x| >= 2r.
        return all(sign_real(d2 - 4 * r2val) >= 0 for d2 in displaced)

    for _ in range(256):
        if fits(r2):
            break
        r2 = r2 / 4
    else:
        raise InvalidAtlasError("restriction radius search did not terminate")
    if cid is None:
        cid = f"{chart.cid}~{_short_hash(chart.cid, repr(x), str(r2))}"
    sub = Chart(cid, Ball(x, CycNum.rational(m, r2)), tuple(stab))
    inclusion = Embedding(cid, chart.cid, AffineMap.identity(m, chart.dim))
    return sub, inclusion


def common_span(
    atlas: Atlas, lam_nl: Embedding, x_n: Point, lam_pl: Embedding, x_p: Point
) -> Span:
    """Complete two embeddings into a common target, with marked points mapping
    to the same image, to a commuting square on maps and marked points.

    The oracle supplies a raw span identifying the points; a conjugator in the
    target group measures the failure of the square, and the unique stabilizer
    element of the marked point repairs it.
    """
    if lam_nl.dst != lam_pl.dst:
        raise OracleRefusedError("embeddings do not share a target chart")
    if lam_nl(x_n) != lam_pl(x_p):
        raise OracleRefusedError("marked points are not identified in the target")
    raw = atlas.refine(lam_nl.src, x_n, lam_pl.src, x_p)
    if raw is None:
        raise OracleRefusedError(
            f"oracle did not identify ({lam_nl.src}, {x_n!r}) with ({lam_pl.src}, {x_p!r})"
        )
    target = atlas.chart(lam_nl.dst)
    alpha = lam_nl.map.compose(raw.left.map)
    beta = lam_pl.map.compose(raw.right.map)
    g = find_conjugator(target, alpha, beta)
    if g.is_identity():
        left = raw.left
    else:
        span_chart = atlas.chart(raw.chart)
        fixed = None
        for h in stabilizer(span_chart, raw.point):
            if alpha.compose(h) == g.compose(alpha):
                fixed = h
                break
        if fixed is None:
            raise InvalidAtlasError("no stabilizer element repairs the span")
        left = Embedding(raw.left.src, raw.left.dst, raw.left.map.compose(fixed))
    span = Span(raw.chart, raw.point, left, raw.right)
    # postcondition: both squares commute on maps and on marked points
    if lam_nl.map.compose(span.left.map) != lam_pl.map.compose(span.right.map):
        raise InvalidAtlasError("span square does not commute")
    if span.left(span.point) != x_n or span.right(span.point) != x_p:
        raise InvalidAtlasError("span does not hit the marked points")
    return span


def validate_span(atlas: Atlas, span: Span) -> Report:
    rep = Report(f"span at {span.chart}")
    if span.chart not in atlas.charts:
        rep.add("span chart in atlas", False, span.chart)
        return rep
    chart = atlas.chart(span.chart)
    rep.add("marked point in domain", point_in_ball(span.point, chart.ball))
    for leg in (span.left, span.right):
        if leg.src != span.chart:
            rep.add("leg source is span chart", False, repr(leg))
            continue
        rep.add(f"leg to {leg.dst} stored in the atlas", atlas.in_family(leg))
        sub = validate_embedding(leg, atlas)
        rep.add(f"leg to {leg.dst} valid", sub.ok, "; ".join(n for n, _ in sub.failures()))
    return rep


def validate_atlas(atlas: Atlas, samples: int = 20, rng=None) -> Report:
    """Full structural validation: charts, stored embeddings, closure of the
    embedding family under composition, witnesses, and oracle determinism."""
    import random

    rng = rng or random.Random(0)
    rep = Report("atlas")
    rep.add("has charts", bool(atlas.charts))
    dims = {c.dim for c in atlas.charts.values()}
    rep.add("single dimension", dims == {atlas.dim}, f"dims {dims}")
    for chart in atlas.charts.values():
        sub = validate_chart(chart)
        rep.add(f"chart {chart.cid}", sub.ok, "; ".join(n for n, _ in sub.failures()))
    for (src, dst), e in atlas.reps.items():
        if src not in atlas.charts or dst not in atlas.charts:
            rep.add(f"representative {src}->{dst} endpoints exist", False)
            continue
        sub = validate_embedding(e, atlas)
        rep.add(f"representative {src}->{dst}", sub.ok, "; ".join(n for n, _ in sub.failures()))
    # closure: composites of stored representatives stay representable
    closure_ok = True
    detail = ""
    for (a, b), e1 in atlas.reps.items():
        for (b2, c), e2 in atlas.reps.items():
            if b2 != b or a == c:
                continue
            comp = e2.map.compose(e1.map)
            if (a, c) not in atlas.reps:
                closure_ok, detail = False, f"no representative for {a}->{c}"
                break
            try:
                find_conjugator(atlas.chart(c), atlas.reps[(a, c)].map, comp)
            except (NoConjugatorError, NotUniqueError):
                closure_ok, detail = False, f"composite {a}->{b}->{c} not representable"
                break
        if not closure_ok:
            break
    rep.add("embedding family closed under composition", closure_ok, detail)
    for w in atlas.witnesses:
        sub = validate_span(atlas, w)
        rep.add(
            f"witness {w.left.dst}|{w.right.dst} via {w.chart}",
            sub.ok,
            "; ".join(n for n, _ in sub.failures()),
        )
    for cid, pts in atlas.unit_points.items():
        rep.add(
            f"unit witness points of {cid} in domain",
            all(point_in_ball(p, atlas.chart(cid).ball) for p in pts),
        )
    # oracle determinism and span validity on witnessed and random queries
    queries = [(w.left.dst, w.left(w.point), w.right.dst, w.right(w.point)) for w in atlas.witnesses]
    for cid in atlas.chart_ids():
        for p in atlas.witness_points(cid):
            queries.append((cid, p, cid, p))
    det_ok = True
    span_ok = True
    for ci, x, cj, y in queries[: max(samples, len(queries))]:
        first = atlas.refine(ci, x, cj, y)
        second = atlas.refine(ci, x, cj, y)
        if (first is None) != (second is None):
            det_ok = False
        elif first is not None and (
            first.chart != second.chart
            or first.point != second.point
            or first.left.map != second.left.map
            or first.right.map != second.right.map
        ):
            det_ok = False
        if first is None:
            span_ok = False
        elif not validate_span(atlas, first).ok:
            span_ok = False
    rep.add("oracle deterministic", det_ok)
    rep.add("oracle spans valid", span_ok)
    return rep
