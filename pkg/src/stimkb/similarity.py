"""Relatedness measures used to rank stimuli against a query term.

All measures return a score in [0, 1] with rel(x, x) = 1 and
rel(x, y) < 1 for distinct operands.  Inclusion and Levenshtein work on
case-folded keyword strings; path length, Wu-Palmer, Leacock-Chodorow and
Li work on taxonomy concepts.

Leacock-Chodorow and Li are normalized so the identity and range contract
holds: LCH divides the raw -log(d / 2 * maxDepth) score (with the standard
0.5 node-count guard for d = 0) by its d = 0 value; Li divides
e^(-alpha*d) * tanh(beta * depth(lcs)) by tanh(beta * max-operand-depth).
"""

import math
from enum import Enum

from .errors import ValidationError


class Measure(str, Enum):
    INCLUSION = "inclusion"
    LEVENSHTEIN = "levenshtein"
    PATH_LENGTH = "pathlen"
    WU_PALMER = "wupalmer"
    LEACOCK_CHODOROW = "lch"
    LI = "li"


LEXICAL_MEASURES = frozenset({Measure.INCLUSION, Measure.LEVENSHTEIN})
CONCEPT_MEASURES = frozenset(
    {Measure.PATH_LENGTH, Measure.WU_PALMER, Measure.LEACOCK_CHODOROW, Measure.LI}
)

LI_ALPHA = 0.2
LI_BETA = 0.6
LCH_ZERO_DISTANCE_GUARD = 0.5


def parse_measure(name):
    try:
        return Measure(name.casefold())
    except ValueError:
        valid = ", ".join(m.value for m in Measure)
        raise ValidationError(f"unknown measure {name!r} (expected one of {valid})")


def _check_nonempty(a, b):
    if not a or not b:
        raise ValidationError("relatedness operands must be non-empty strings")


def inclusion_rel(a, b):
    """1 if equal after case-folding, len(shorter)/len(longer) if one
    contains the other, 0 otherwise."""
    _check_nonempty(a, b)
    a, b = a.casefold(), b.casefold()
    if a == b:
        return 1.0
    short, long_ = sorted((a, b), key=len)
    if short in long_:
        return len(short) / len(long_)
    return 0.0


def levenshtein_distance(a, b):
    """Unit-cost edit distance (insert/delete/substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_rel(a, b):
    _check_nonempty(a, b)
    a, b = a.casefold(), b.casefold()
    return 1.0 - levenshtein_distance(a, b) / max(len(a), len(b))


def path_length_rel(g, a, b):
    return 1.0 / (1.0 + g.shortest_path(a, b))


def wu_palmer_rel(g, a, b):
    # Path-based form: on trees this equals 2*depth(lcs)/(depth(a)+depth(b));
    # on DAGs with min-root-distance depth it stays within [0, 1], which the
    # naive depth-ratio form does not.
    lcs = g.lcs(a, b)
    dl = g.depth(lcs)
    da = g.up_distance(a, lcs)
    db = g.up_distance(b, lcs)
    return 2.0 * dl / (da + db + 2.0 * dl)


def leacock_chodorow_rel(g, a, b):
    d = g.shortest_path(a, b)
    denom = 2.0 * g.max_depth
    raw = -math.log(max(d, LCH_ZERO_DISTANCE_GUARD) / denom)
    norm = -math.log(LCH_ZERO_DISTANCE_GUARD / denom)
    return max(0.0, raw / norm)


def li_rel(g, a, b, alpha=LI_ALPHA, beta=LI_BETA):
    d = g.shortest_path(a, b)
    h = g.depth(g.lcs(a, b))
    raw = math.exp(-alpha * d) * math.tanh(beta * h)
    # Normalizer includes h so DAG anomalies (ancestor deeper than both
    # operands under min-root-distance depth) cannot push the score past 1.
    norm = math.tanh(beta * max(h, g.depth(a), g.depth(b)))
    return raw / norm


def relatedness(measure, x, y, graph=None):
    """Dispatch to the measure matching the operand kind.

    Lexical measures take keyword strings; concept measures take concept
    names and require `graph`.
    """
    measure = Measure(measure)
    if measure in LEXICAL_MEASURES:
        if measure is Measure.INCLUSION:
            return inclusion_rel(x, y)
        return levenshtein_rel(x, y)
    if graph is None:
        raise ValidationError(
            f"measure {measure.value!r} needs a taxonomy; it cannot be "
            "applied to raw keywords"
        )
    if measure is Measure.PATH_LENGTH:
        return path_length_rel(graph, x, y)
    if measure is Measure.WU_PALMER:
        return wu_palmer_rel(graph, x, y)
    if measure is Measure.LEACOCK_CHODOROW:
        return leacock_chodorow_rel(graph, x, y)
    return li_rel(graph, x, y)
