"""Refinement oracles: the decision procedures identifying points across charts.

The span-search oracle derives every identification from the stored data (chart
groups and representative embeddings) by a deterministic one-step search; it
covers global quotients and all glued galleries.  The span-table oracle answers
only from a finite recorded table and serves user-supplied atlases.  The
pushforward wrapper renames the underlying space without changing any answer.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

from .errors import InvalidRelabelingError
from .geometry import Point, point_in_ball

# imported lazily by type checkers only; Span/Atlas come from .atlas at runtime


class RefinementOracle(ABC):
    kind: str = "abstract"

    @abstractmethod
    def refine(self, atlas, ci: str, x: Point, cj: str, y: Point):
        """Span identifying (ci, x) with (cj, y), or None."""

    @abstractmethod
    def locate(self, atlas, ci: str, x: Point, cj: str):
        """Some point of chart cj identified with (ci, x), or None."""

    def params(self) -> dict:
        return {}


class SpanSearchOracle(RefinementOracle):
    """One-step search over the atlas's own embedding families.

    Two points are identified iff some chart embeds into both of their charts
    carrying one marked point to each; for a valid atlas the stored families
    realize every identification in one step.
    """

    kind = "span_search"

    def refine(self, atlas, ci, x, cj, y):
        from .atlas import Span

        for k in atlas.chart_ids():
            ball_k = atlas.chart(k).ball
            for left in atlas.family(k, ci):
                if not left.map.is_invertible():
                    continue
                z = left.map.inverse()(x)
                if not point_in_ball(z, ball_k):
                    continue
                if left(z) != x:
                    continue
                for right in atlas.family(k, cj):
                    if right(z) == y:
                        return Span(k, z, left, right)
        return None

    def locate(self, atlas, ci, x, cj):
        if ci == cj:
            return x
        for k in atlas.chart_ids():
            ball_k = atlas.chart(k).ball
            fam_j = atlas.family(k, cj)
            if not fam_j:
                continue
            for left in atlas.family(k, ci):
                if not left.map.is_invertible():
                    continue
                z = left.map.inverse()(x)
                if point_in_ball(z, ball_k) and left(z) == x:
                    return fam_j[0](z)
        return None


class SpanTableOracle(RefinementOracle):
    """Finite recorded identification table for user atlases.

    Entries are spans; a query matches when both legs hit the queried points,
    possibly after translating the span point by a span-chart group element.
    """

    kind = "span_table"

    def __init__(self, entries=()):
        self.entries = tuple(entries)

    def params(self) -> dict:
        return {"entries": len(self.entries)}

    def _matches(self, atlas, span, ci, x, cj, y):
        if span.left.dst != ci or span.right.dst != cj:
            return None
        for g in atlas.chart(span.chart).group:
            z = g(span.point)
            if span.left(z) == x and span.right(z) == y:
                from .atlas import Span

                return Span(span.chart, z, span.left, span.right)
        return None

    def refine(self, atlas, ci, x, cj, y):
        fallback = SpanSearchOracle().refine(atlas, ci, x, cj, y)
        if fallback is not None:
            return fallback
        for span in self.entries:
            hit = self._matches(atlas, span, ci, x, cj, y)
            if hit is not None:
                return hit
            hit = self._matches(atlas, _flip(span), cj, y, ci, x)
            if hit is not None:
                return _flip(hit)
        return None

    def locate(self, atlas, ci, x, cj):
        found = SpanSearchOracle().locate(atlas, ci, x, cj)
        if found is not None:
            return found
        for span in list(self.entries) + [_flip(s) for s in self.entries]:
            if span.left.dst != ci or span.right.dst != cj:
                continue
            for g in atlas.chart(span.chart).group:
                z = g(span.point)
                if span.left(z) == x:
                    return span.right(z)
        return None


def _flip(span):
    from .atlas import Span

    return Span(span.chart, span.point, span.right, span.left)


class PushforwardOracle(RefinementOracle):
    """Oracle of a pushed-forward atlas: identifications are unchanged because
    the relabeling homeomorphism is bijective; only the space labels move."""

    kind = "pushforward"

    def __init__(self, inner: RefinementOracle, relabel: dict[str, str]):
        values = list(relabel.values())
        if len(set(values)) != len(values):
            raise InvalidRelabelingError("relabeling is not injective")
        self.inner = inner
        self.relabel = dict(relabel)

    def params(self) -> dict:
        return {"relabel": self.relabel, "inner": {"kind": self.inner.kind, "params": self.inner.params()}}

    def refine(self, atlas, ci, x, cj, y):
        return self.inner.refine(atlas, ci, x, cj, y)

    def locate(self, atlas, ci, x, cj):
        return self.inner.locate(atlas, ci, x, cj)


ORACLE_KINDS = {
    "span_search": SpanSearchOracle,
    # aliases kept for gallery files: both are realized by the span search
    "global_quotient": SpanSearchOracle,
    "gluing": SpanSearchOracle,
}


def oracle_from_doc(kind: str, params: dict, span_parser=None):
    if kind in ORACLE_KINDS:
        return ORACLE_KINDS[kind]()
    if kind == "span_table":
        entries = params.get("spans", [])
        return SpanTableOracle(tuple(span_parser(s) for s in entries) if span_parser else ())
    if kind == "pushforward":
        inner = oracle_from_doc(params["inner"]["kind"], params["inner"].get("params", {}), span_parser)
        return PushforwardOracle(inner, params.get("relabel", {}))
    raise InvalidRelabelingError(f"unknown oracle kind {kind!r}")
