"""Query parsing, subsumption-filter evaluation, and ranked retrieval.

Query grammar (one line, whitespace-separated clauses, implicit AND):

    concept:<Ident> | keyword:"<text>" | keyword:<word>
    valence:[lo,hi] | arousal:[lo,hi] | dominance:[lo,hi]
    category:<vocab>.<term> | db:<Ident>
    measure:inclusion|levenshtein|pathlen|wupalmer|lch|li
    mode:filter|rank | limit:<int>

At most one of concept/keyword.  Rank mode defaults: measure wupalmer for
concept terms, levenshtein for keywords, limit 100.
"""

import re
from dataclasses import dataclass, field

from .errors import QueryError, UnknownConceptError, ValidationError
from .similarity import (
    CONCEPT_MEASURES,
    LEXICAL_MEASURES,
    Measure,
    parse_measure,
    relatedness,
)

MODE_FILTER = "filter"
MODE_RANK = "rank"

BOX_DIMENSIONS = ("valence", "arousal", "dominance")

DEFAULT_LIMIT = 100

_CLAUSE_RE = re.compile(r'(\S+?):("[^"]*"|\[[^\]\s]*\]|\S+)')


@dataclass
class Query:
    concept: str | None = None
    keyword: str | None = None
    boxes: dict = field(default_factory=dict)  # dimension -> (lo, hi)
    category: tuple | None = None  # (vocab, term)
    db_name: str | None = None
    measure: Measure | None = None
    mode: str = MODE_RANK
    limit: int | None = None

    @property
    def term(self):
        return self.concept if self.concept is not None else self.keyword


@dataclass(frozen=True)
class RankedResult:
    entries: tuple  # ((stimulus key, score), ...) scores non-increasing
    query: Query
    measure: Measure


def parse_query(text):
    """Parse the one-line query grammar into a Query with defaults applied."""
    q = Query()
    pos = 0
    seen = set()
    stripped = text.strip()
    if not stripped:
        raise QueryError("empty query", position=0)
    for m in _CLAUSE_RE.finditer(text):
        gap = text[pos:m.start()]
        if gap.strip():
            raise QueryError(f"unparseable text {gap.strip()!r}", position=pos)
        key, value = m.group(1), m.group(2)
        vpos = m.start(2)
        if key in seen:
            raise QueryError(f"duplicate clause {key!r}", position=m.start())
        seen.add(key)
        if key == "concept":
            q.concept = value
        elif key == "keyword":
            q.keyword = value[1:-1] if value.startswith('"') else value
            if not q.keyword:
                raise QueryError("empty keyword", position=vpos)
        elif key in BOX_DIMENSIONS:
            q.boxes[key] = _parse_interval(value, vpos)
        elif key == "category":
            vocab, sep, term = value.partition(".")
            if not sep or not vocab or not term:
                raise QueryError(
                    f"expected category:<vocab>.<term>, got {value!r}", position=vpos
                )
            q.category = (vocab, term)
        elif key == "db":
            q.db_name = value
        elif key == "measure":
            try:
                q.measure = parse_measure(value)
            except ValidationError as e:
                raise QueryError(str(e), position=vpos) from None
        elif key == "mode":
            if value not in (MODE_FILTER, MODE_RANK):
                raise QueryError(
                    f"mode must be filter or rank, got {value!r}", position=vpos
                )
            q.mode = value
        elif key == "limit":
            if not value.isdigit() or int(value) < 1:
                raise QueryError(
                    f"limit must be a positive integer, got {value!r}", position=vpos
                )
            q.limit = int(value)
        else:
            raise QueryError(f"unknown clause {key!r}", position=m.start())
        pos = m.end()
    if text[pos:].strip():
        raise QueryError(f"unparseable text {text[pos:].strip()!r}", position=pos)

    if q.concept is not None and q.keyword is not None:
        raise QueryError("at most one of concept/keyword allowed", position=0)

    if q.mode == MODE_RANK:
        if q.term is None:
            raise QueryError("rank mode requires a concept or keyword term",
                             position=0)
        if q.measure is None:
            q.measure = (
                Measure.WU_PALMER if q.concept is not None else Measure.LEVENSHTEIN
            )
        if q.limit is None:
            q.limit = DEFAULT_LIMIT
        _check_measure_kind(q)
    else:
        if q.concept is None and q.category is None and not q.boxes:
            raise QueryError(
                "filter mode requires a concept, a category, or a dimension box",
                position=0,
            )
    return q


def _parse_interval(value, pos):
    m = re.fullmatch(r"\[([^,\]]+),([^,\]]+)\]", value)
    if not m:
        raise QueryError(f"expected [lo,hi], got {value!r}", position=pos)
    try:
        lo, hi = float(m.group(1)), float(m.group(2))
    except ValueError:
        raise QueryError(f"non-numeric interval bound in {value!r}",
                         position=pos) from None
    if lo > hi:
        raise QueryError(f"inverted interval [{lo}, {hi}]", position=pos)
    return (lo, hi)


def _check_measure_kind(q):
    if q.concept is not None and q.measure in LEXICAL_MEASURES:
        raise QueryError(
            f"measure {q.measure.value!r} is lexical but the query term is a concept"
        )
    if q.keyword is not None and q.measure in CONCEPT_MEASURES:
        raise QueryError(
            f"measure {q.measure.value!r} needs a concept term, not a keyword"
        )


def _passes_boxes(rec, boxes):
    if not boxes:
        return True
    if rec.dimensions is None:
        return False
    for dim, (lo, hi) in boxes.items():
        v = getattr(rec.dimensions, dim)
        if v is None or not lo <= v <= hi:
            return False
    return True


def _passes_category(rec, category, closure):
    want = f"{category[0]}.{category[1]}"
    for cat in rec.categories:
        if cat.qualified == want:
            return True
        if closure is not None and closure.are_equivalent(cat.qualified, want):
            return True
    return False


def filter_query(corpus, graph, q, closure=None):
    """Return the set of stimulus keys satisfying all present clauses."""
    if q.mode != MODE_FILTER:
        raise ValidationError("filter_query requires a filter-mode query")
    if q.concept is not None and q.concept not in graph.concepts:
        raise UnknownConceptError(f"unknown concept in query: {q.concept!r}")
    result = set()
    for rec in corpus:
        if q.db_name is not None and rec.db != q.db_name:
            continue
        if not _passes_boxes(rec, q.boxes):
            continue
        if q.category is not None and not _passes_category(rec, q.category, closure):
            continue
        if q.concept is not None:
            if not any(
                graph.is_subclass_of(c, q.concept) for c in rec.concepts()
            ):
                continue
        result.add(rec.key)
    return result


def score_record(measure, term, rec, graph=None):
    """MAX over the record's semantics annotations of relatedness to `term`.

    Concept measures read annotation concepts, lexical measures read
    annotation keywords; a record with no annotation of the matching kind
    scores 0.
    """
    operands = (
        rec.concepts() if measure in CONCEPT_MEASURES
        else [s.keyword for s in rec.semantics if s.keyword]
    )
    best = 0.0
    for op in operands:
        best = max(best, relatedness(measure, term, op, graph=graph))
    return best


def ranked_query(corpus, graph, q, closure=None):
    """Rank the candidate set (corpus after box/db/category filters) by
    relatedness to the query term; truncate to limit after sorting."""
    if q.mode != MODE_RANK:
        raise ValidationError("ranked_query requires a rank-mode query")
    _check_measure_kind(q)
    if q.concept is not None and q.concept not in graph.concepts:
        raise UnknownConceptError(f"unknown concept in query: {q.concept!r}")
    scored = []
    for rec in corpus:
        if q.db_name is not None and rec.db != q.db_name:
            continue
        if not _passes_boxes(rec, q.boxes):
            continue
        if q.category is not None and not _passes_category(rec, q.category, closure):
            continue
        scored.append((rec.key, score_record(q.measure, q.term, rec, graph=graph)))
    scored.sort(key=lambda e: (-e[1], e[0]))
    if q.limit is not None:
        scored = scored[: q.limit]
    return RankedResult(entries=tuple(scored), query=q, measure=q.measure)
