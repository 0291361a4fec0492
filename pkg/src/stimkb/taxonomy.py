"""Rooted concept hierarchy (IS-A DAG) and its serializations.

Concepts are case-sensitive identifiers arranged in a single-rooted DAG.
Depth is the minimum distance to the root, with depth(root) = 1.  The
ancestor closure and depths are materialized once at construction; a built
graph is immutable and safe for concurrent readers.
"""

import re
from collections import deque

from .errors import CycleError, ParseError, UnknownConceptError, ValidationError

IDENT_RE = re.compile(r"^[A-Za-z0-9_-]+$")

VIRTUAL_ROOT = "Entity"


class TaxonomyGraph:
    """Immutable rooted DAG of concepts with precomputed closure and depths."""

    def __init__(self, parent_edges):
        """Build from a child -> iterable-of-parents mapping.

        Nodes appearing only as parents are created implicitly.  If more
        than one node is parentless, a virtual root "Entity" is inserted
        above all of them.
        """
        edges = {}
        nodes = set()
        for child, parents in parent_edges.items():
            nodes.add(child)
            edges.setdefault(child, set())
            for p in parents:
                nodes.add(p)
                edges[child].add(p)
                edges.setdefault(p, set())
        if not nodes:
            raise ValidationError("taxonomy has no concepts")

        roots = sorted(n for n in nodes if not edges[n])
        if len(roots) > 1:
            nodes.add(VIRTUAL_ROOT)
            edges.setdefault(VIRTUAL_ROOT, set())
            for r in roots:
                if r != VIRTUAL_ROOT:
                    edges[r].add(VIRTUAL_ROOT)
            root = VIRTUAL_ROOT
        elif len(roots) == 1:
            root = roots[0]
        else:
            raise CycleError("every concept has a parent; taxonomy is cyclic")

        self._check_acyclic(edges)

        self.concepts = frozenset(nodes)
        self.parent_edges = {c: frozenset(ps) for c, ps in edges.items()}
        self.child_edges = {c: set() for c in nodes}
        for child, parents in edges.items():
            for p in parents:
                self.child_edges[p].add(child)
        self.child_edges = {c: frozenset(ch) for c, ch in self.child_edges.items()}
        self.root = root
        self.ancestor_closure = self._build_closure()
        self.depth_cache = self._build_depths()
        self.max_depth = max(self.depth_cache.values())

    @staticmethod
    def _check_acyclic(edges):
        # Iterative DFS over parent edges; gray nodes are on the current path.
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {n: WHITE for n in edges}
        for start in sorted(edges):
            if color[start] != WHITE:
                continue
            stack = [(start, iter(sorted(edges[start])))]
            color[start] = GRAY
            while stack:
                node, it = stack[-1]
                advanced = False
                for parent in it:
                    if color[parent] == GRAY:
                        raise CycleError(
                            f"cycle detected at edge {node} -> {parent}"
                        )
                    if color[parent] == WHITE:
                        color[parent] = GRAY
                        stack.append((parent, iter(sorted(edges[parent]))))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()

    def _build_closure(self):
        # Topological resolution avoids recursion limits on deep chains.
        closure = {}
        pending = deque(sorted(self.concepts))
        while pending:
            c = pending.popleft()
            if c in closure:
                continue
            if all(p in closure for p in self.parent_edges[c]):
                acc = set()
                for p in self.parent_edges[c]:
                    acc.add(p)
                    acc |= closure[p]
                closure[c] = frozenset(acc)
            else:
                pending.append(c)
        return closure

    def _build_depths(self):
        depths = {self.root: 1}
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            for child in self.child_edges[node]:
                d = depths[node] + 1
                if child not in depths or d < depths[child]:
                    depths[child] = d
                    queue.append(child)
        return depths

    def _require(self, c):
        if c not in self.concepts:
            raise UnknownConceptError(f"unknown concept: {c!r}")

    def ancestors(self, c):
        """Transitive closure of parents, excluding `c` itself."""
        self._require(c)
        return self.ancestor_closure[c]

    def depth(self, c):
        self._require(c)
        return self.depth_cache[c]

    def lcs(self, a, b):
        """Deepest most-specific common subsumer of `a` and `b` (either
        operand counts as its own subsumer); ties broken by smallest name.

        Candidates are first restricted to those not strictly subsuming
        another candidate; on a DAG with min-root-distance depth a plain
        depth argmax could otherwise pick an ancestor of the answer.
        """
        self._require(a)
        self._require(b)
        common = (self.ancestor_closure[a] | {a}) & (self.ancestor_closure[b] | {b})
        specific = [
            c for c in common
            if not any(c in self.ancestor_closure[d] for d in common if d != c)
        ]
        return min(specific, key=lambda c: (-self.depth_cache[c], c))

    def shortest_path(self, a, b):
        """Edge count of the shortest path treating IS-A edges as undirected."""
        self._require(a)
        self._require(b)
        if a == b:
            return 0
        seen = {a}
        queue = deque([(a, 0)])
        while queue:
            node, dist = queue.popleft()
            for nxt in self.parent_edges[node] | self.child_edges[node]:
                if nxt == b:
                    return dist + 1
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, dist + 1))
        raise ValidationError(f"no path between {a!r} and {b!r}")

    def up_distance(self, c, ancestor):
        """Minimum number of parent-edge steps from `c` up to `ancestor`."""
        self._require(c)
        self._require(ancestor)
        if c == ancestor:
            return 0
        if ancestor not in self.ancestor_closure[c]:
            raise ValidationError(f"{ancestor!r} does not subsume {c!r}")
        seen = {c}
        queue = deque([(c, 0)])
        while queue:
            node, dist = queue.popleft()
            for parent in self.parent_edges[node]:
                if parent == ancestor:
                    return dist + 1
                if parent not in seen:
                    seen.add(parent)
                    queue.append((parent, dist + 1))
        raise AssertionError("unreachable: closure guaranteed a path")

    def is_subclass_of(self, a, b):
        """Reflexive-transitive subsumption test: a == b or b subsumes a."""
        self._require(a)
        self._require(b)
        return a == b or b in self.ancestor_closure[a]

    def serialize(self):
        """Edge list in the taxonomy file format (one `child\\tparent` per line)."""
        lines = []
        for child in sorted(self.concepts):
            for parent in sorted(self.parent_edges[child]):
                lines.append(f"{child}\t{parent}")
        return "\n".join(lines) + ("\n" if lines else "")


def parse_taxonomy(text):
    """Parse the `child<TAB>parent` edge-list format into a TaxonomyGraph.

    Blank lines and `#` comments are ignored; duplicate edges are tolerated.
    """
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(
                f"expected `child<TAB>parent`, got {raw!r}", line=lineno
            )
        child, parent = (p.strip() for p in parts)
        for ident in (child, parent):
            if not IDENT_RE.match(ident):
                raise ParseError(f"invalid identifier {ident!r}", line=lineno)
        edges.setdefault(child, set()).add(parent)
        edges.setdefault(parent, set())
    if not edges:
        raise ParseError("taxonomy file contains no edges")
    return TaxonomyGraph(edges)


class KeywordMapping:
    """Flat keyword -> set-of-concepts table; keywords are case-folded."""

    def __init__(self, entries):
        self.entries = {k.casefold(): frozenset(v) for k, v in entries.items()}

    def concepts_for(self, keyword):
        return self.entries.get(keyword.casefold(), frozenset())

    def __contains__(self, keyword):
        return keyword.casefold() in self.entries

    def __len__(self):
        return len(self.entries)


def parse_mapping(text, graph):
    """Parse `keyword<TAB>concept` lines; every concept must exist in `graph`."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(
                f"expected `keyword<TAB>concept`, got {raw!r}", line=lineno
            )
        keyword, concept = parts[0].strip(), parts[1].strip()
        if not keyword:
            raise ParseError("empty keyword", line=lineno)
        if concept not in graph.concepts:
            raise ParseError(
                f"unknown concept {concept!r} for keyword {keyword!r}",
                line=lineno,
            )
        entries.setdefault(keyword.casefold(), set()).add(concept)
    return KeywordMapping(entries)
