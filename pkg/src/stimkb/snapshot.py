"""Workspace manifest parsing and the self-contained snapshot file.

A manifest is a flat `key=value` file naming the input files (taxonomy,
mapping, vocabularies, axioms, records, legacy) plus defaults (seed,
measure, limit); paths are resolved relative to the manifest.  Ingest
builds everything once and writes a single versioned JSON snapshot, so
queries and evaluation never re-parse the raw inputs.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from .affect import build_equivalence_closure, load_vocabularies, parse_axioms
from .corpus import (
    Corpus,
    expand_keywords,
    parse_corpus_records,
    parse_legacy_table,
    serialize_record,
)
from .errors import ParseError, StimKbError
from .taxonomy import parse_mapping, parse_taxonomy

SNAPSHOT_VERSION = 1

MANIFEST_FILE_KEYS = (
    "taxonomy",
    "mapping",
    "vocabularies",
    "axioms",
    "records",
    "legacy",
    "judgments",
)
MANIFEST_OPTION_KEYS = ("seed", "measure", "limit")


@dataclass
class Manifest:
    paths: dict  # key -> resolved Path (subset of MANIFEST_FILE_KEYS)
    seed: int = 0
    measure: str | None = None
    limit: int | None = None


def parse_manifest(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    paths = {}
    options = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not value:
            raise ParseError(f"expected `key=value`, got {raw!r}", line=lineno)
        if key in MANIFEST_FILE_KEYS:
            paths[key] = (path.parent / value).resolve()
        elif key in MANIFEST_OPTION_KEYS:
            options[key] = value
        else:
            raise ParseError(f"unknown manifest key {key!r}", line=lineno)
    if "taxonomy" not in paths:
        raise ParseError("manifest must name a taxonomy file")
    return Manifest(
        paths=paths,
        seed=int(options.get("seed", "0")),
        measure=options.get("measure"),
        limit=int(options["limit"]) if "limit" in options else None,
    )


def _read(manifest, key):
    p = manifest.paths.get(key)
    if p is None:
        return None
    if not p.is_file():
        raise FileNotFoundError(f"{key} file not found: {p}")
    return p.read_text()


@dataclass
class Workspace:
    """Everything the query/eval/sequence commands need, fully built."""

    graph: object
    mapping: object
    vocabs: dict
    closure: object
    corpus: Corpus
    unmapped_keywords: list
    seed: int = 0
    measure: str | None = None
    limit: int | None = None


def build_workspace(manifest):
    taxonomy_text = _read(manifest, "taxonomy")
    graph = parse_taxonomy(taxonomy_text)

    mapping_text = _read(manifest, "mapping")
    mapping = parse_mapping(mapping_text, graph) if mapping_text is not None else None

    vocab_text = _read(manifest, "vocabularies")
    vocabs = load_vocabularies(vocab_text if vocab_text is not None else "")

    axiom_text = _read(manifest, "axioms")
    axioms = parse_axioms(axiom_text) if axiom_text is not None else []
    closure = build_equivalence_closure(axioms)

    records = []
    records_text = _read(manifest, "records")
    if records_text is not None:
        records.extend(parse_corpus_records(records_text, graph, vocabs))
    legacy_text = _read(manifest, "legacy")
    if legacy_text is not None:
        records.extend(parse_legacy_table(legacy_text))

    unmapped = []
    if mapping is not None:
        records, unmapped = expand_keywords(records, mapping)

    corpus = Corpus(graph=graph, vocabs=vocabs)
    for rec in records:
        corpus.add_stimulus(rec)

    return Workspace(
        graph=graph,
        mapping=mapping,
        vocabs=vocabs,
        closure=closure,
        corpus=corpus,
        unmapped_keywords=unmapped,
        seed=manifest.seed,
        measure=manifest.measure,
        limit=manifest.limit,
    )


def save_snapshot(workspace, path):
    """Persist the workspace as a versioned JSON document.

    The taxonomy/mapping/vocab/axiom inputs are stored in their wire
    formats and re-parsed at load, which keeps the snapshot format tied to
    the already-tested parsers.
    """
    mapping_lines = None
    if workspace.mapping is not None:
        mapping_lines = [
            f"{kw}\t{c}"
            for kw, cs in sorted(workspace.mapping.entries.items())
            for c in sorted(cs)
        ]
    vocab_lines = [
        f"{vid}\t{term}"
        for vid, vocab in sorted(workspace.vocabs.items())
        for term in sorted(vocab.terms)
    ]
    axiom_lines = [
        "\t".join(a.split(".", 1) + b.split(".", 1))
        for cls in workspace.closure.classes()
        for a, b in zip(cls, cls[1:])
    ]
    doc = {
        "version": SNAPSHOT_VERSION,
        "seed": workspace.seed,
        "measure": workspace.measure,
        "limit": workspace.limit,
        "taxonomy": workspace.graph.serialize(),
        "mapping": "\n".join(mapping_lines) + "\n" if mapping_lines else None,
        "vocabularies": "\n".join(vocab_lines) + "\n",
        "axioms": "\n".join(axiom_lines) + "\n" if axiom_lines else None,
        "records": [serialize_record(r) for r in workspace.corpus],
        "unmapped_keywords": workspace.unmapped_keywords,
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_snapshot(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"snapshot not found: {path}")
    doc = json.loads(path.read_text())
    if doc.get("version") != SNAPSHOT_VERSION:
        raise StimKbError(
            f"unsupported snapshot version {doc.get('version')!r}"
        )
    graph = parse_taxonomy(doc["taxonomy"])
    mapping = (
        parse_mapping(doc["mapping"], graph) if doc.get("mapping") else None
    )
    vocabs = load_vocabularies(doc.get("vocabularies") or "")
    axioms = parse_axioms(doc.get("axioms") or "")
    closure = build_equivalence_closure(axioms)
    corpus = Corpus(graph=graph, vocabs=vocabs)
    for line in doc["records"]:
        corpus.add_stimulus(
            parse_corpus_records(line, graph, vocabs)[0]
        )
    return Workspace(
        graph=graph,
        mapping=mapping,
        vocabs=vocabs,
        closure=closure,
        corpus=corpus,
        unmapped_keywords=list(doc.get("unmapped_keywords", [])),
        seed=doc.get("seed", 0),
        measure=doc.get("measure"),
        limit=doc.get("limit"),
    )
