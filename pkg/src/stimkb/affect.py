"""Emotion annotations: categorical vocabularies, dimensional values with
confidence, appraisal/action-tendency/sentiment records, and equivalence
closure over qualified emotion terms.

Dimensional values are stored on their source scale (e.g. 1..9) together
with explicit scale bounds; normalization to [0, 1] is a separate step.
Cross-vocabulary equivalence exists only where an explicit axiom states it.
"""

from dataclasses import dataclass

from .errors import ParseError, ValidationError

CONFIDENCE_LEVELS = ("VeryHigh", "High", "Average", "Low", "VeryLow")

BIG_SIX_ID = "BigSix"
BIG_SIX_REQUIRED = frozenset({"anger", "disgust", "fear", "happiness", "sadness"})
BIG_SIX_TERMS = frozenset(
    {"anger", "disgust", "fear", "happiness", "sadness", "surprise"}
)

DIMENSION_NAMES = (
    "valence",
    "arousal",
    "dominance",
    "potency",
    "unpredictability",
    "intensity",
)
DIMENSION_SD_NAMES = ("valenceSD", "arousalSD", "dominanceSD")


@dataclass(frozen=True)
class Vocabulary:
    id: str
    terms: frozenset

    def __post_init__(self):
        if not self.terms:
            raise ValidationError(f"vocabulary {self.id!r} has no terms")


def builtin_big_six():
    return Vocabulary(BIG_SIX_ID, BIG_SIX_TERMS)


def load_vocabularies(text):
    """Parse `vocab<TAB>term` lines into a dict of Vocabulary by id.

    A built-in BigSix is supplied when the file does not define one.  A
    file-supplied BigSix must still contain the five primary emotions.
    """
    terms_by_id = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"expected `vocab<TAB>term`, got {raw!r}", line=lineno)
        vocab, term = parts[0].strip(), parts[1].strip()
        if not vocab or not term:
            raise ParseError("empty vocabulary id or term", line=lineno)
        terms_by_id.setdefault(vocab, set()).add(term)

    vocabs = {}
    for vid, terms in terms_by_id.items():
        if vid == BIG_SIX_ID and not BIG_SIX_REQUIRED <= terms:
            missing = sorted(BIG_SIX_REQUIRED - terms)
            raise ValidationError(f"BigSix is missing required terms: {missing}")
        vocabs[vid] = Vocabulary(vid, frozenset(terms))
    if BIG_SIX_ID not in vocabs:
        vocabs[BIG_SIX_ID] = builtin_big_six()
    return vocabs


@dataclass(frozen=True)
class CategoryAnnotation:
    vocabulary: str
    term: str
    confidence_level: str | None = None
    confidence_value: float | None = None

    @property
    def qualified(self):
        return f"{self.vocabulary}.{self.term}"


def _check_confidence(ann, problems):
    if ann.confidence_level is not None and ann.confidence_level not in CONFIDENCE_LEVELS:
        problems.append(
            f"confidenceLevel {ann.confidence_level!r} not one of {CONFIDENCE_LEVELS}"
        )
    if ann.confidence_value is not None and not 0.0 <= ann.confidence_value <= 1.0:
        problems.append(f"confidenceValue {ann.confidence_value} outside [0, 1]")


def validate_category(ann, vocabs):
    """Return a list of problems; empty means the annotation is valid."""
    problems = []
    vocab = vocabs.get(ann.vocabulary)
    if vocab is None:
        problems.append(f"unknown vocabulary {ann.vocabulary!r}")
    elif ann.term not in vocab.terms:
        problems.append(f"term {ann.term!r} not in vocabulary {ann.vocabulary!r}")
    _check_confidence(ann, problems)
    return problems


@dataclass(frozen=True)
class DimensionAnnotation:
    scale_min: float
    scale_max: float
    valence: float | None = None
    arousal: float | None = None
    dominance: float | None = None
    potency: float | None = None
    unpredictability: float | None = None
    intensity: float | None = None
    valenceSD: float | None = None
    arousalSD: float | None = None
    dominanceSD: float | None = None
    confidence_level: str | None = None
    confidence_value: float | None = None

    def values(self):
        """Present (name, value) pairs in declaration order."""
        return [
            (name, getattr(self, name))
            for name in DIMENSION_NAMES
            if getattr(self, name) is not None
        ]


def validate_dimension(ann):
    problems = []
    if ann.scale_min >= ann.scale_max:
        problems.append(
            f"scaleMin {ann.scale_min} must be < scaleMax {ann.scale_max}"
        )
        return problems
    present = ann.values()
    if not present:
        problems.append("no dimension value present")
    for name, v in present:
        if not ann.scale_min <= v <= ann.scale_max:
            problems.append(
                f"{name}={v} outside scale [{ann.scale_min}, {ann.scale_max}]"
            )
    for name in DIMENSION_SD_NAMES:
        sd = getattr(ann, name)
        if sd is not None and sd < 0:
            problems.append(f"{name}={sd} is negative")
    _check_confidence(ann, problems)
    return problems


def normalize_dimension(ann):
    """Map each present value to (v - scaleMin) / (scaleMax - scaleMin)."""
    span = ann.scale_max - ann.scale_min
    if span == 0:
        raise ValidationError("degenerate scale: scaleMax equals scaleMin")
    return {name: (v - ann.scale_min) / span for name, v in ann.values()}


@dataclass(frozen=True)
class AppraisalAnnotation:
    values: tuple  # ((name, float-in-[0,1]), ...)


@dataclass(frozen=True)
class ActionTendencyAnnotation:
    term: str
    confidence_level: str | None = None
    confidence_value: float | None = None


@dataclass(frozen=True)
class SentimentAnnotation:
    value: float
    confidence_level: str | None = None
    confidence_value: float | None = None


def validate_unit_interval(name, value, problems):
    if not 0.0 <= value <= 1.0:
        problems.append(f"{name}={value} outside [0, 1]")


class EquivalenceClosure:
    """Union-find partition of qualified terms `vocab.term`.

    Unknown terms behave as singleton classes.
    """

    def __init__(self, axioms=()):
        self._parent = {}
        for a, b in axioms:
            self._union(self._check(a), self._check(b))

    @staticmethod
    def _check(term):
        if term.count(".") < 1 or term.startswith(".") or term.endswith("."):
            raise ParseError(f"malformed qualified term {term!r}")
        return term

    def _find(self, t):
        if t not in self._parent:
            return t
        root = t
        while self._parent.get(root, root) != root:
            root = self._parent[root]
        while self._parent.get(t, t) != root:
            self._parent[t], t = root, self._parent[t]
        return root

    def _union(self, a, b):
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            # Deterministic representative: smallest name wins.
            lo, hi = sorted((ra, rb))
            self._parent.setdefault(lo, lo)
            self._parent[hi] = lo

    def are_equivalent(self, a, b):
        return a == b or self._find(a) == self._find(b)

    def classes(self):
        """Partition of all terms mentioned in axioms, as sorted tuples."""
        groups = {}
        for t in self._parent:
            groups.setdefault(self._find(t), set()).add(t)
        return sorted(tuple(sorted(g)) for g in groups.values())


def build_equivalence_closure(axioms):
    return EquivalenceClosure(axioms)


def parse_axioms(text):
    """Parse `vocabA<TAB>termA<TAB>vocabB<TAB>termB` lines into term pairs."""
    axioms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ParseError(
                f"expected 4 tab-separated fields, got {len(parts)}", line=lineno
            )
        va, ta, vb, tb = (p.strip() for p in parts)
        if not all((va, ta, vb, tb)):
            raise ParseError("empty field in axiom", line=lineno)
        axioms.append((f"{va}.{ta}", f"{vb}.{tb}"))
    return axioms
