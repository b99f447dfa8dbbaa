"""Per-corpus, per-category frequency profiles and sampling utilities."""

from __future__ import annotations

import csv
import gzip
import io
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

from .derivation import SentenceRecord, extract_occurrences
from .errors import (
    CategoryMismatch,
    EmptyCorpus,
    NoAuthorsFound,
    SampleTooLarge,
    StaleCache,
)
from .hierarchy import Category, TypeHierarchy, classify
from .rng import SplitMix64

CACHE_FORMAT = "grammar-profile/profile-cache"
CORPUS_CACHE_FORMAT = "grammar-profile/corpus-cache"
CACHE_VERSION = 1


@dataclass
class FrequencyProfile:
    """Occurrence counts of one category's identifiers in one corpus."""

    corpus_id: str
    category: Category
    counts: dict[str, int]
    sentence_count: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @cached_property
    def rel_freq(self) -> dict[str, float]:
        """counts normalized by the category-local total; {} when empty."""
        total = self.total
        if total == 0:
            return {}
        return {ident: n / total for ident, n in self.counts.items()}

    @property
    def support(self) -> set[str]:
        return {ident for ident, n in self.counts.items() if n > 0}


@dataclass
class SamplePlan:
    """Reproducible sentence-sampling parameters."""

    sample_size: int
    seed: int
    replacement: bool = False

    def __post_init__(self):
        if self.sample_size < 1:
            raise ValueError("sample_size must be at least 1")


def sentence_labels(
    record: SentenceRecord, hierarchy: Optional[TypeHierarchy]
) -> dict[Category, list[str]]:
    """Occurrence labels of one sentence, bucketed by category."""
    buckets: dict[Category, list[str]] = {}
    for label in extract_occurrences(record.derivation):
        buckets.setdefault(classify(label, hierarchy), []).append(label)
    return buckets


def build_profile(
    records: Sequence[SentenceRecord],
    hierarchy: Optional[TypeHierarchy],
    category: Category = Category.ALL,
    corpus_id: Optional[str] = None,
) -> FrequencyProfile:
    """Aggregate occurrence counts over sentences, filtered to a category.

    ``category=Category.ALL`` keeps every occurrence regardless of its
    classification.  ``corpus_id`` defaults to the (joined, sorted) ids
    found in the records.
    """
    if not records:
        raise EmptyCorpus("cannot build a profile from zero sentences")
    counts: dict[str, int] = {}
    for record in records:
        for label in extract_occurrences(record.derivation):
            if category is not Category.ALL and classify(label, hierarchy) is not category:
                continue
            counts[label] = counts.get(label, 0) + 1
    if corpus_id is None:
        corpus_id = "+".join(sorted({r.corpus_id for r in records}))
    return FrequencyProfile(corpus_id, category, counts, len(records))


def profile_from_label_lists(
    label_lists: Sequence[Sequence[str]],
    corpus_id: str,
    category: Category,
) -> FrequencyProfile:
    """Profile from pre-extracted per-sentence label lists (cache path)."""
    if not label_lists:
        raise EmptyCorpus("cannot build a profile from zero sentences")
    counts: dict[str, int] = {}
    for labels in label_lists:
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
    return FrequencyProfile(corpus_id, category, counts, len(label_lists))


def merge_profiles(profiles: Sequence[FrequencyProfile], corpus_id: Optional[str] = None) -> FrequencyProfile:
    """Sum counts across profiles of one category (associative, commutative)."""
    if not profiles:
        raise EmptyCorpus("nothing to merge")
    category = profiles[0].category
    counts: dict[str, int] = {}
    sentences = 0
    for profile in profiles:
        if profile.category is not category:
            raise CategoryMismatch(
                f"cannot merge {profile.category.value} into {category.value}"
            )
        sentences += profile.sentence_count
        for ident, n in profile.counts.items():
            counts[ident] = counts.get(ident, 0) + n
    if corpus_id is None:
        corpus_id = "+".join(sorted({p.corpus_id for p in profiles}))
    return FrequencyProfile(corpus_id, category, counts, sentences)


def sample_corpus(
    records: Sequence,
    plan: SamplePlan,
    key: Optional[Callable] = None,
) -> list:
    """Deterministic uniform sample of sentences.

    Records are sorted by ``key`` (default: the record's ``(corpus_id,
    item_id)`` key) before sampling, so the result does not depend on input
    file ordering.  The generator is the package's fixed SplitMix64 stream
    (see FORMATS.md), making samples reproducible across platforms.
    """
    if key is None:
        key = lambda r: r.key
    ordered = sorted(records, key=key)
    n = len(ordered)
    rng = SplitMix64(plan.seed)
    if plan.replacement:
        picked = [ordered[rng.randbelow(n)] for _ in range(plan.sample_size)]
    else:
        if plan.sample_size > n:
            raise SampleTooLarge(
                f"asked for {plan.sample_size} of {n} sentences without replacement"
            )
        rng.shuffle_prefix(ordered, plan.sample_size)
        picked = ordered[:plan.sample_size]
    return sorted(picked, key=key)


def group_by_author(
    records: Sequence[SentenceRecord], min_sentences: int
) -> dict[str, list[SentenceRecord]]:
    """Sentences grouped by author, keeping authors with enough of them.

    Records without author metadata are excluded.  Raises NoAuthorsFound
    when no author clears ``min_sentences``.
    """
    groups: dict[str, list[SentenceRecord]] = {}
    for record in records:
        if record.author:
            groups.setdefault(record.author, []).append(record)
    kept = {author: groups[author] for author in sorted(groups)
            if len(groups[author]) >= min_sentences}
    if not kept:
        raise NoAuthorsFound(
            f"no author has at least {min_sentences} sentences"
        )
    return kept


def diff_items(
    a: FrequencyProfile,
    b: FrequencyProfile,
    min_count_a: int,
    max_count_b: int,
) -> list[tuple[str, int]]:
    """Identifiers frequent in ``a`` and rare (or absent) in ``b``.

    Returns (identifier, count_in_a) pairs with count_a >= min_count_a and
    count_b <= max_count_b, most frequent first, ties alphabetical.
    """
    _check_same_category(a, b)
    picked = []
    for ident in a.support | b.support:
        count_a = a.counts.get(ident, 0)
        if count_a >= min_count_a and b.counts.get(ident, 0) <= max_count_b:
            picked.append((ident, count_a))
    picked.sort(key=lambda pair: (-pair[1], pair[0]))
    return picked


def not_in_only_in(human: FrequencyProfile, llm: FrequencyProfile) -> tuple[int, int]:
    """(identifiers only the human corpus uses, identifiers only the LLM uses)."""
    _check_same_category(human, llm)
    human_support = human.support
    llm_support = llm.support
    return (len(human_support - llm_support), len(llm_support - human_support))


def _check_same_category(a: FrequencyProfile, b: FrequencyProfile) -> None:
    if a.category is not b.category:
        raise CategoryMismatch(
            f"profiles compare {a.category.value} vs {b.category.value}"
        )


# --- serialization ----------------------------------------------------------

def write_profile_csv(profile: FrequencyProfile, path: str) -> None:
    """CSV export: identifier,count,rel_freq (sorted, 6-decimal floats)."""
    rel = profile.rel_freq
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["identifier", "count", "rel_freq"])
        for ident in sorted(profile.counts):
            writer.writerow([ident, profile.counts[ident], f"{rel.get(ident, 0.0):.6f}"])


def _gzip_bytes(payload: bytes) -> bytes:
    buf = io.BytesIO()
    # mtime pinned so identical payloads give identical files
    with gzip.GzipFile(filename="", mode="wb", fileobj=buf, mtime=0) as zf:
        zf.write(payload)
    return buf.getvalue()


def _dump_json_gz(obj: dict, path: str) -> None:
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(_gzip_bytes(payload))


def _load_json_gz(path: str) -> dict:
    with gzip.open(path, "rb") as handle:
        return json.loads(handle.read().decode("utf-8"))


def save_profile_cache(profile: FrequencyProfile, path: str, grammar_checksum: str) -> None:
    """Versioned binary cache; invalidated by the grammar-file checksum."""
    _dump_json_gz(
        {
            "format": CACHE_FORMAT,
            "version": CACHE_VERSION,
            "grammar_checksum": grammar_checksum,
            "corpus_id": profile.corpus_id,
            "category": profile.category.value,
            "sentence_count": profile.sentence_count,
            "counts": dict(sorted(profile.counts.items())),
        },
        path,
    )


def load_profile_cache(path: str, grammar_checksum: Optional[str] = None) -> FrequencyProfile:
    obj = _load_json_gz(path)
    if obj.get("format") != CACHE_FORMAT or obj.get("version") != CACHE_VERSION:
        raise StaleCache(f"{path}: not a version-{CACHE_VERSION} profile cache")
    if grammar_checksum is not None and obj.get("grammar_checksum") != grammar_checksum:
        raise StaleCache(f"{path}: grammar changed since this cache was written")
    return FrequencyProfile(
        corpus_id=obj["corpus_id"],
        category=Category(obj["category"]),
        counts={k: int(v) for k, v in obj["counts"].items()},
        sentence_count=int(obj["sentence_count"]),
    )


@dataclass
class CachedSentence:
    """Per-sentence occurrence labels, bucketed by category."""

    item_id: str
    author: Optional[str]
    labels: dict[Category, list[str]]


@dataclass
class CorpusCache:
    """Sentence-level cache for one corpus; profiles derive from it."""

    corpus_id: str
    sentences: list[CachedSentence] = field(default_factory=list)

    def label_lists(self, category: Category) -> list[list[str]]:
        if category is Category.ALL:
            return [
                [label for labels in s.labels.values() for label in labels]
                for s in self.sentences
            ]
        return [s.labels.get(category, []) for s in self.sentences]

    def profile(self, category: Category) -> FrequencyProfile:
        return profile_from_label_lists(
            self.label_lists(category), self.corpus_id, category
        )


def cache_from_records(
    corpus_id: str,
    records: Sequence[SentenceRecord],
    hierarchy: Optional[TypeHierarchy],
) -> CorpusCache:
    cache = CorpusCache(corpus_id)
    for record in sorted(records, key=lambda r: r.key):
        buckets = sentence_labels(record, hierarchy)
        cache.sentences.append(
            CachedSentence(record.item_id, record.author, buckets)
        )
    return cache


def save_corpus_cache(cache: CorpusCache, path: str, grammar_checksum: str) -> None:
    _dump_json_gz(
        {
            "format": CORPUS_CACHE_FORMAT,
            "version": CACHE_VERSION,
            "grammar_checksum": grammar_checksum,
            "corpus_id": cache.corpus_id,
            "sentences": [
                {
                    "item": s.item_id,
                    "author": s.author,
                    "labels": {
                        cat.value: labels
                        for cat, labels in sorted(
                            s.labels.items(), key=lambda kv: kv[0].value
                        )
                    },
                }
                for s in cache.sentences
            ],
        },
        path,
    )


def load_corpus_cache(path: str, grammar_checksum: Optional[str] = None) -> CorpusCache:
    obj = _load_json_gz(path)
    if obj.get("format") != CORPUS_CACHE_FORMAT or obj.get("version") != CACHE_VERSION:
        raise StaleCache(f"{path}: not a version-{CACHE_VERSION} corpus cache")
    if grammar_checksum is not None and obj.get("grammar_checksum") != grammar_checksum:
        raise StaleCache(f"{path}: grammar changed since this cache was written")
    cache = CorpusCache(obj["corpus_id"])
    for entry in obj["sentences"]:
        cache.sentences.append(
            CachedSentence(
                item_id=str(entry["item"]),
                author=entry.get("author"),
                labels={Category(c): list(ls) for c, ls in entry["labels"].items()},
            )
        )
    return cache
