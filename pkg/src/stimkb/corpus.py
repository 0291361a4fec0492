"""Stimulus records (the assertional half of the knowledge base) plus
ingestion, validation, keyword expansion, and indexing.

Record file format: one record per line, tab-separated `key=value` tokens.
Repeatable keys (`sem`, `cat`, `appraisal`, `phys`) may pack several values
with `;`.  Keys:

    db=IAPS  id=8163                       required; record key is "db/id"
    sem=Object:concept:GroupOfPeople       or  sem=Scene:keyword:winter street
    cat=BigSix.happiness@level=Average,value=0.9    confidence part optional
    dim.scale=1:9  dim.valence=7.14  dim.arousal=6.53  dim.valenceSD=...
    dim.level=Average  dim.value=0.9       dimension confidence, optional
    appraisal=pleasantness:0.7
    tendency=approach@level=High           sentiment=0.8@value=0.9
    ctx.lengthSeconds=6  ctx.mediaFormat=wav  ctx.author=...  ctx.location=...
    ctx=1                                  bare context (db/id only)
    phys=http://example.org/subject1_hr HR       channel after space, optional

Values may not contain tabs or `;`.  Blank lines and `#` comments ignored.

Legacy table format: TSV with header
`id db keyword valence valenceSD arousal arousalSD dominance dominanceSD`,
`NA` for missing values; every row becomes a keyword-only Object record on
the 1..9 scale.
"""

from dataclasses import dataclass, replace

from .affect import (
    DIMENSION_NAMES,
    DIMENSION_SD_NAMES,
    ActionTendencyAnnotation,
    AppraisalAnnotation,
    CategoryAnnotation,
    DimensionAnnotation,
    SentimentAnnotation,
    validate_category,
    validate_dimension,
    validate_unit_interval,
)
from .errors import ParseError, ValidationError

SEMANTIC_KINDS = ("Object", "Scene", "Event")

LEGACY_HEADER = [
    "id",
    "db",
    "keyword",
    "valence",
    "valenceSD",
    "arousal",
    "arousalSD",
    "dominance",
    "dominanceSD",
]

CONTEXT_FIELDS = (
    "mediaFormat",
    "widthPx",
    "heightPx",
    "sizeBytes",
    "colorDepthBits",
    "lengthSeconds",
    "author",
    "owner",
    "createdAt",
    "location",
    "dcType",
    "dcCreator",
    "dcContributor",
    "dcDate",
    "dcFormat",
)
_CONTEXT_INT_FIELDS = {"widthPx", "heightPx", "sizeBytes", "colorDepthBits"}
_CONTEXT_REAL_FIELDS = {"lengthSeconds"}


@dataclass(frozen=True)
class SemanticsAnnotation:
    kind: str  # Object | Scene | Event
    concept: str | None = None
    keyword: str | None = None


@dataclass(frozen=True)
class ContextRecord:
    id: str
    db_name: str
    media_format: str | None = None
    width_px: int | None = None
    height_px: int | None = None
    size_bytes: int | None = None
    color_depth_bits: int | None = None
    length_seconds: float | None = None
    author: str | None = None
    owner: str | None = None
    created_at: str | None = None
    location: str | None = None
    dc_type: str | None = None
    dc_creator: str | None = None
    dc_contributor: str | None = None
    dc_date: str | None = None
    dc_format: str | None = None


_CTX_ATTR = {
    "mediaFormat": "media_format",
    "widthPx": "width_px",
    "heightPx": "height_px",
    "sizeBytes": "size_bytes",
    "colorDepthBits": "color_depth_bits",
    "lengthSeconds": "length_seconds",
    "author": "author",
    "owner": "owner",
    "createdAt": "created_at",
    "location": "location",
    "dcType": "dc_type",
    "dcCreator": "dc_creator",
    "dcContributor": "dc_contributor",
    "dcDate": "dc_date",
    "dcFormat": "dc_format",
}


@dataclass(frozen=True)
class PhysiologyRef:
    path: str
    channel: str | None = None


@dataclass(frozen=True)
class StimulusRecord:
    db: str
    id: str
    semantics: tuple = ()
    categories: tuple = ()
    dimensions: DimensionAnnotation | None = None
    appraisals: tuple = ()
    action_tendencies: tuple = ()
    sentiments: tuple = ()
    context: ContextRecord | None = None
    physiology: tuple = ()

    @property
    def key(self):
        return f"{self.db}/{self.id}"

    def concepts(self):
        return sorted({s.concept for s in self.semantics if s.concept})

    def keywords(self):
        return sorted({s.keyword.casefold() for s in self.semantics if s.keyword})


def validate_stimulus(rec, graph=None, vocabs=None):
    """Return a list of problems; empty means valid.

    Concept existence is checked only when `graph` is given, vocabulary
    membership only when `vocabs` is given.
    """
    problems = []
    if not rec.db or not rec.id:
        problems.append("record key requires non-empty db and id")

    has_emotion = bool(
        rec.categories
        or rec.dimensions is not None
        or rec.appraisals
        or rec.action_tendencies
        or rec.sentiments
    )
    if not (rec.semantics or has_emotion or rec.context or rec.physiology):
        problems.append(
            "four-component axiom violated: record has no semantics, "
            "emotion, context, or physiology component"
        )

    for sem in rec.semantics:
        if sem.kind not in SEMANTIC_KINDS:
            problems.append(f"semantics kind {sem.kind!r} not in {SEMANTIC_KINDS}")
        if sem.concept is None and sem.keyword is None:
            problems.append("semantics annotation needs a concept or a keyword")
        if graph is not None and sem.concept is not None:
            if sem.concept not in graph.concepts:
                problems.append(f"unknown concept {sem.concept!r}")

    if vocabs is not None:
        for cat in rec.categories:
            problems.extend(validate_category(cat, vocabs))
    if rec.dimensions is not None:
        problems.extend(validate_dimension(rec.dimensions))
    for app in rec.appraisals:
        for name, value in app.values:
            validate_unit_interval(f"appraisal {name}", value, problems)
    for sen in rec.sentiments:
        validate_unit_interval("sentiment", sen.value, problems)
    for phy in rec.physiology:
        if not phy.path:
            problems.append("physiology reference with empty path")

    if rec.context is not None:
        for attr in ("width_px", "height_px", "size_bytes", "color_depth_bits",
                     "length_seconds"):
            v = getattr(rec.context, attr)
            if v is not None and v < 0:
                problems.append(f"context {attr}={v} is negative")
    return problems


class Corpus:
    """Append-only store of validated stimulus records with concept and
    keyword indices; treat as immutable once queries start."""

    def __init__(self, graph=None, vocabs=None):
        self.graph = graph
        self.vocabs = vocabs
        self.records = {}
        self.concept_index = {}
        self.keyword_index = {}

    def add_stimulus(self, rec):
        problems = validate_stimulus(rec, self.graph, self.vocabs)
        if problems:
            raise ValidationError(
                f"record {rec.key}: " + "; ".join(problems), problems=problems
            )
        if rec.key in self.records:
            raise ValidationError(f"duplicate stimulus key {rec.key}")
        self.records[rec.key] = rec
        for c in rec.concepts():
            self.concept_index.setdefault(c, set()).add(rec.key)
        for k in rec.keywords():
            self.keyword_index.setdefault(k, set()).add(rec.key)

    def get_stimulus(self, key):
        if key not in self.records:
            raise KeyError(f"unknown stimulus key {key}")
        return self.records[key]

    def stimuli_by_concept(self, concept):
        return set(self.concept_index.get(concept, set()))

    def stimuli_by_keyword(self, keyword):
        return set(self.keyword_index.get(keyword.casefold(), set()))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records.values())


def _parse_number(text, kind, what, lineno):
    try:
        return kind(text)
    except ValueError:
        raise ParseError(f"non-numeric {what}: {text!r}", line=lineno) from None


def _split_confidence(value, lineno):
    """Split `payload[@level=L,value=V]` into (payload, level, value)."""
    if "@" not in value:
        return value, None, None
    payload, _, conf = value.partition("@")
    level = cvalue = None
    for part in conf.split(","):
        k, sep, v = part.partition("=")
        if not sep:
            raise ParseError(f"malformed confidence part {part!r}", line=lineno)
        if k == "level":
            level = v
        elif k == "value":
            cvalue = _parse_number(v, float, "confidence value", lineno)
        else:
            raise ParseError(f"unknown confidence key {k!r}", line=lineno)
    return payload, level, cvalue


def _parse_sem(value, lineno):
    parts = value.split(":", 2)
    if len(parts) != 3 or parts[1] not in ("concept", "keyword"):
        raise ParseError(
            f"expected `Kind:concept:Name` or `Kind:keyword:text`, got {value!r}",
            line=lineno,
        )
    kind, marker, payload = parts
    if not payload:
        raise ParseError("empty semantics payload", line=lineno)
    if marker == "concept":
        return SemanticsAnnotation(kind=kind, concept=payload)
    return SemanticsAnnotation(kind=kind, keyword=payload)


def _parse_cat(value, lineno):
    payload, level, cvalue = _split_confidence(value, lineno)
    vocab, sep, term = payload.partition(".")
    if not sep or not vocab or not term:
        raise ParseError(f"expected `Vocab.term`, got {payload!r}", line=lineno)
    return CategoryAnnotation(vocab, term, level, cvalue)


def _repeat(value):
    return [v for v in value.split(";") if v]


def parse_record_line(line, lineno=None):
    tokens = [t for t in line.split("\t") if t]
    fields = {"db": None, "id": None}
    sems, cats, apps, tends, sents, phys = [], [], [], [], [], []
    dim = {}
    ctx = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            raise ParseError(f"expected `key=value`, got {token!r}", line=lineno)
        if key in ("db", "id"):
            fields[key] = value
        elif key == "sem":
            sems.extend(_parse_sem(v, lineno) for v in _repeat(value))
        elif key == "cat":
            cats.extend(_parse_cat(v, lineno) for v in _repeat(value))
        elif key == "appraisal":
            for v in _repeat(value):
                name, sep2, num = v.rpartition(":")
                if not sep2:
                    raise ParseError(f"expected `name:value`, got {v!r}", line=lineno)
                apps.append((name, _parse_number(num, float, "appraisal", lineno)))
        elif key == "tendency":
            payload, level, cvalue = _split_confidence(value, lineno)
            tends.append(ActionTendencyAnnotation(payload, level, cvalue))
        elif key == "sentiment":
            payload, level, cvalue = _split_confidence(value, lineno)
            sents.append(
                SentimentAnnotation(
                    _parse_number(payload, float, "sentiment", lineno), level, cvalue
                )
            )
        elif key == "phys":
            for v in _repeat(value):
                path, _, channel = v.partition(" ")
                phys.append(PhysiologyRef(path, channel or None))
        elif key == "dim.scale":
            lo, sep2, hi = value.partition(":")
            if not sep2:
                raise ParseError(f"expected `min:max`, got {value!r}", line=lineno)
            dim["scale_min"] = _parse_number(lo, float, "scale min", lineno)
            dim["scale_max"] = _parse_number(hi, float, "scale max", lineno)
        elif key == "dim.level":
            dim["confidence_level"] = value
        elif key == "dim.value":
            dim["confidence_value"] = _parse_number(
                value, float, "dimension confidence", lineno
            )
        elif key.startswith("dim."):
            name = key[len("dim."):]
            if name not in DIMENSION_NAMES and name not in DIMENSION_SD_NAMES:
                raise ParseError(f"unknown dimension field {name!r}", line=lineno)
            dim[name] = _parse_number(value, float, f"dimension {name}", lineno)
        elif key == "ctx":
            # Presence marker for a context with no metadata beyond db/id.
            ctx.setdefault("_present", True)
        elif key.startswith("ctx."):
            name = key[len("ctx."):]
            if name not in _CTX_ATTR:
                raise ParseError(f"unknown context field {name!r}", line=lineno)
            if name in _CONTEXT_INT_FIELDS:
                ctx[_CTX_ATTR[name]] = _parse_number(value, int, name, lineno)
            elif name in _CONTEXT_REAL_FIELDS:
                ctx[_CTX_ATTR[name]] = _parse_number(value, float, name, lineno)
            else:
                ctx[_CTX_ATTR[name]] = value
        else:
            raise ParseError(f"unknown record field {key!r}", line=lineno)

    if not fields["db"] or not fields["id"]:
        raise ParseError("record requires db= and id=", line=lineno)

    dimensions = None
    if dim:
        if "scale_min" not in dim:
            raise ParseError(
                "dimension values require dim.scale=min:max", line=lineno
            )
        dimensions = DimensionAnnotation(**dim)
    context = None
    if ctx:
        ctx.pop("_present", None)
        context = ContextRecord(id=fields["id"], db_name=fields["db"], **ctx)

    return StimulusRecord(
        db=fields["db"],
        id=fields["id"],
        semantics=tuple(sems),
        categories=tuple(cats),
        dimensions=dimensions,
        appraisals=tuple([AppraisalAnnotation(tuple(apps))] if apps else []),
        action_tendencies=tuple(tends),
        sentiments=tuple(sents),
        context=context,
        physiology=tuple(phys),
    )


def parse_corpus_records(text, graph=None, vocabs=None):
    """Parse the record file; every record must validate."""
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        rec = parse_record_line(line, lineno)
        problems = validate_stimulus(rec, graph, vocabs)
        if problems:
            raise ValidationError(
                f"record {rec.key} (line {lineno}): " + "; ".join(problems),
                problems=problems,
            )
        records.append(rec)
    return records


def _fmt_num(v):
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return repr(v) if isinstance(v, float) else str(v)


def _conf_suffix(level, value):
    parts = []
    if level is not None:
        parts.append(f"level={level}")
    if value is not None:
        parts.append(f"value={_fmt_num(value)}")
    return "@" + ",".join(parts) if parts else ""


def serialize_record(rec):
    tokens = [f"db={rec.db}", f"id={rec.id}"]
    for sem in rec.semantics:
        if sem.concept is not None:
            tokens.append(f"sem={sem.kind}:concept:{sem.concept}")
        else:
            tokens.append(f"sem={sem.kind}:keyword:{sem.keyword}")
    for cat in rec.categories:
        tokens.append(
            f"cat={cat.vocabulary}.{cat.term}"
            + _conf_suffix(cat.confidence_level, cat.confidence_value)
        )
    d = rec.dimensions
    if d is not None:
        tokens.append(f"dim.scale={_fmt_num(d.scale_min)}:{_fmt_num(d.scale_max)}")
        for name, v in d.values():
            tokens.append(f"dim.{name}={_fmt_num(v)}")
        for name in ("valenceSD", "arousalSD", "dominanceSD"):
            v = getattr(d, name)
            if v is not None:
                tokens.append(f"dim.{name}={_fmt_num(v)}")
        if d.confidence_level is not None:
            tokens.append(f"dim.level={d.confidence_level}")
        if d.confidence_value is not None:
            tokens.append(f"dim.value={_fmt_num(d.confidence_value)}")
    for app in rec.appraisals:
        for name, v in app.values:
            tokens.append(f"appraisal={name}:{_fmt_num(v)}")
    for t in rec.action_tendencies:
        tokens.append(
            f"tendency={t.term}" + _conf_suffix(t.confidence_level, t.confidence_value)
        )
    for s in rec.sentiments:
        tokens.append(
            f"sentiment={_fmt_num(s.value)}"
            + _conf_suffix(s.confidence_level, s.confidence_value)
        )
    if rec.context is not None:
        ctx_tokens = []
        for wire, attr in _CTX_ATTR.items():
            v = getattr(rec.context, attr)
            if v is not None:
                v = _fmt_num(v) if isinstance(v, (int, float)) else v
                ctx_tokens.append(f"ctx.{wire}={v}")
        tokens.extend(ctx_tokens if ctx_tokens else ["ctx=1"])
    for phy in rec.physiology:
        channel = f" {phy.channel}" if phy.channel else ""
        tokens.append(f"phys={phy.path}{channel}")
    return "\t".join(tokens)


def serialize_records(records):
    return "".join(serialize_record(r) + "\n" for r in records)


def parse_legacy_table(text):
    """Parse an IAPS-style keyword + ratings TSV into stimulus records."""
    lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    if not lines:
        return []
    header = lines[0].split("\t")
    if header != LEGACY_HEADER:
        raise ParseError(
            f"legacy header must be {LEGACY_HEADER}, got {header}", line=1
        )
    records = []
    for lineno, raw in enumerate(lines[1:], start=2):
        cols = raw.split("\t")
        if len(cols) != len(LEGACY_HEADER):
            raise ParseError(
                f"expected {len(LEGACY_HEADER)} columns, got {len(cols)}",
                line=lineno,
            )
        row = dict(zip(LEGACY_HEADER, cols))

        def num(name, lineno=lineno, row=row):
            v = row[name].strip()
            if v == "NA" or v == "":
                return None
            return _parse_number(v, float, name, lineno)

        dims = {name: num(name) for name in LEGACY_HEADER[3:]}
        if all(v is None for n, v in dims.items() if not n.endswith("SD")):
            raise ParseError("row has no dimension value", line=lineno)
        records.append(
            StimulusRecord(
                db=row["db"],
                id=row["id"],
                semantics=(
                    SemanticsAnnotation(kind="Object", keyword=row["keyword"]),
                ),
                dimensions=DimensionAnnotation(scale_min=1.0, scale_max=9.0, **dims),
                context=ContextRecord(id=row["id"], db_name=row["db"]),
            )
        )
    return records


def expand_keywords(records, mapping):
    """Add one concept annotation per mapped concept for every keyword
    annotation; returns (new_records, sorted-unmapped-keyword list).

    Idempotent: concepts already present on a record are not duplicated.
    """
    out = []
    unmapped = set()
    for rec in records:
        existing = {(s.kind, s.concept) for s in rec.semantics if s.concept}
        added = []
        for sem in rec.semantics:
            if sem.keyword is None:
                continue
            concepts = mapping.concepts_for(sem.keyword)
            if not concepts:
                unmapped.add(sem.keyword.casefold())
                continue
            for c in sorted(concepts):
                if (sem.kind, c) not in existing:
                    existing.add((sem.kind, c))
                    added.append(SemanticsAnnotation(kind=sem.kind, concept=c))
        if added:
            rec = replace(rec, semantics=rec.semantics + tuple(added))
        out.append(rec)
    return out, sorted(unmapped)
