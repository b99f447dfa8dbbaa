"""Assemble profiles into comparison, frequency, and variance reports.

Emission is deterministic: fixed key ordering, floats at six decimals,
and gzip-free plain text, so identical inputs give byte-identical files.
CSV and JSON schemas are documented in FORMATS.md.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CategoryMismatch, TooFewProfiles, UnsupportedFormat, ZeroVector
from .hierarchy import ANALYSIS_CATEGORIES, Category
from .profiles import FrequencyProfile, merge_profiles
from .stats import Pca2Result, align_many, pca2

SCHEMA_VERSION = 1
REPORT_FORMATS = ("csv", "json", "svg-scatter")

ProfileGroup = dict[Category, FrequencyProfile]


@dataclass
class ComparisonReport:
    """Cosine matrix, PCA coordinates, and ranked pairs for one category."""

    category: Category
    corpus_ids: list[str]
    matrix: np.ndarray
    pca: Optional[Pca2Result]
    pairs: list[tuple[str, str, float]]


@dataclass
class FrequencyRow:
    identifier: str
    human_rel: list[float]
    llm_rel: list[float]
    llm_rel_mean: float
    human_rate: list[float]
    llm_rate: list[float]
    llm_rate_mean: float
    human_count: int
    llm_count_mean: float


@dataclass
class FrequencyComparison:
    """Per-identifier human-vs-LLM frequency rows (the dots-vs-bar view).

    Each row carries both normalizations: relative frequency within the
    category and per-sentence rate.
    """

    category: Category
    human_ids: list[str]
    llm_ids: list[str]
    rows: list[FrequencyRow]


@dataclass
class PairwiseVarianceReport:
    """Cosine similarities bucketed into human-human / human-LLM / LLM-LLM."""

    category: Category
    author_ids: list[str]
    llm_ids: list[str]
    groups: dict[str, list[tuple[str, str, float]]]
    summaries: dict[str, dict[str, float]] = field(default_factory=dict)


PAIR_GROUPS = ("human-human", "human-llm", "llm-llm")


def _cosine_matrix(profiles: Sequence[FrequencyProfile]) -> np.ndarray:
    _ids, matrix = align_many(profiles)
    norms = np.linalg.norm(matrix, axis=1)
    for i, norm in enumerate(norms):
        if norm == 0.0:
            raise ZeroVector(
                f"profile {profiles[i].corpus_id!r} has no occurrences to compare"
            )
    unit = matrix / norms[:, None]
    cosines = np.clip(unit @ unit.T, 0.0, 1.0)
    cosines = (cosines + cosines.T) / 2.0
    np.fill_diagonal(cosines, 1.0)
    for i in range(len(matrix)):
        for j in range(i + 1, len(matrix)):
            if np.array_equal(matrix[i], matrix[j]):
                cosines[i, j] = cosines[j, i] = 1.0
    return cosines


def build_comparison(
    profiles: Sequence[FrequencyProfile],
    category: Optional[Category] = None,
) -> ComparisonReport:
    """Full cosine matrix over the profiles plus a 2D PCA projection.

    The projection is omitted (None) when fewer than three profiles are
    given.  The pair list is the strict upper triangle, most similar first.
    """
    if len(profiles) < 2:
        raise TooFewProfiles("comparison needs at least 2 profiles")
    if category is not None and profiles[0].category is not category:
        raise CategoryMismatch(
            f"profiles are {profiles[0].category.value}, requested {category.value}"
        )
    matrix = _cosine_matrix(profiles)
    ids = [p.corpus_id for p in profiles]
    pairs = [
        (ids[i], ids[j], float(matrix[i, j]))
        for i in range(len(ids))
        for j in range(i + 1, len(ids))
    ]
    pairs.sort(key=lambda triple: (-triple[2], triple[0], triple[1]))
    projection = pca2(profiles) if len(profiles) >= 3 else None
    return ComparisonReport(profiles[0].category, ids, matrix, projection, pairs)


def build_frequency_comparison(
    human_profiles: Sequence[FrequencyProfile],
    llm_profiles: Sequence[FrequencyProfile],
    top_k: int,
) -> FrequencyComparison:
    """Rows for the identifiers with the highest pooled frequency."""
    if top_k < 1:
        raise ValueError("top_k must be at least 1")
    everything = list(human_profiles) + list(llm_profiles)
    if not human_profiles or not llm_profiles:
        raise TooFewProfiles("need at least one human and one LLM profile")
    first = everything[0].category
    for profile in everything:
        if profile.category is not first:
            raise CategoryMismatch("frequency comparison profiles must share a category")

    pooled: dict[str, int] = {}
    for profile in everything:
        for ident, count in profile.counts.items():
            pooled[ident] = pooled.get(ident, 0) + count
    chosen = sorted(pooled, key=lambda ident: (-pooled[ident], ident))[:top_k]

    rows = []
    for ident in chosen:
        human_rel = [p.rel_freq.get(ident, 0.0) for p in human_profiles]
        llm_rel = [p.rel_freq.get(ident, 0.0) for p in llm_profiles]
        human_rate = [p.counts.get(ident, 0) / p.sentence_count for p in human_profiles]
        llm_rate = [p.counts.get(ident, 0) / p.sentence_count for p in llm_profiles]
        rows.append(
            FrequencyRow(
                identifier=ident,
                human_rel=human_rel,
                llm_rel=llm_rel,
                llm_rel_mean=sum(llm_rel) / len(llm_rel),
                human_rate=human_rate,
                llm_rate=llm_rate,
                llm_rate_mean=sum(llm_rate) / len(llm_rate),
                human_count=sum(p.counts.get(ident, 0) for p in human_profiles),
                llm_count_mean=sum(p.counts.get(ident, 0) for p in llm_profiles)
                / len(llm_profiles),
            )
        )
    return FrequencyComparison(
        first,
        [p.corpus_id for p in human_profiles],
        [p.corpus_id for p in llm_profiles],
        rows,
    )


def _group_vectors(
    groups: Sequence[ProfileGroup],
    block_normalization: bool,
) -> list[np.ndarray]:
    """All-category vectors: per-category rel_freq blocks concatenated.

    With ``block_normalization`` each block keeps its own normalization
    (equal category weight); otherwise counts are pooled and normalized by
    the grand total.
    """
    if block_normalization:
        blocks = []
        for category in ANALYSIS_CATEGORIES:
            present = [g[category] for g in groups if category in g]
            if not present:
                continue
            identifiers = sorted(set().union(*(p.support for p in present)))
            index = {ident: i for i, ident in enumerate(identifiers)}
            block = np.zeros((len(groups), len(identifiers)))
            for row, group in enumerate(groups):
                profile = group.get(category)
                if profile is None:
                    continue
                for ident, freq in profile.rel_freq.items():
                    block[row, index[ident]] = freq
            blocks.append(block)
        return list(np.hstack(blocks)) if blocks else [np.zeros(0)] * len(groups)
    # identifiers never collide across categories, so pooling the counts
    # into one distribution is well-defined
    merged = [
        merge_profiles(
            [
                FrequencyProfile("pooled", Category.ALL, profile.counts, profile.sentence_count)
                for profile in group.values()
            ]
        )
        for group in groups
    ]
    _ids, matrix = align_many(merged)
    return list(matrix)


def build_pairwise_variance(
    author_profiles: Sequence[Union[FrequencyProfile, ProfileGroup]],
    llm_profiles: Sequence[Union[FrequencyProfile, ProfileGroup]],
    category: Category = Category.ALL,
    block_normalization: bool = True,
) -> PairwiseVarianceReport:
    """Pairwise cosine distributions within and across the two populations.

    For a single category pass plain profiles.  For ``Category.ALL`` pass
    per-corpus profile groups (category -> profile); the vectors are then
    concatenations of per-category normalized blocks (or globally
    normalized with ``block_normalization=False``).
    """
    if len(author_profiles) < 2 or len(llm_profiles) < 2:
        raise TooFewProfiles("pairwise variance needs >= 2 profiles on each side")

    entries = list(author_profiles) + list(llm_profiles)
    if category is Category.ALL:
        if not all(isinstance(e, dict) for e in entries):
            raise CategoryMismatch(
                "all-category pairwise analysis needs per-category profile groups"
            )
        names = [_group_name(e) for e in entries]
        vectors = _group_vectors(entries, block_normalization)
    else:
        flat = [e[category] if isinstance(e, dict) else e for e in entries]
        for profile in flat:
            if profile.category is not category:
                raise CategoryMismatch(
                    f"expected {category.value} profiles, got {profile.category.value}"
                )
        names = [p.corpus_id for p in flat]
        _ids, matrix = align_many(flat)
        vectors = list(matrix)

    norms = [np.linalg.norm(v) for v in vectors]
    for name, norm in zip(names, norms):
        if norm == 0.0:
            raise ZeroVector(f"corpus {name!r} has no occurrences to compare")
    unit = [v / n for v, n in zip(vectors, norms)]

    n_human = len(author_profiles)
    groups: dict[str, list[tuple[str, str, float]]] = {g: [] for g in PAIR_GROUPS}
    for i in range(len(unit)):
        for j in range(i + 1, len(unit)):
            value = float(np.clip(np.dot(unit[i], unit[j]), 0.0, 1.0))
            if j < n_human:
                bucket = "human-human"
            elif i >= n_human:
                bucket = "llm-llm"
            else:
                bucket = "human-llm"
            groups[bucket].append((names[i], names[j], value))
    summaries = {}
    for bucket, pairs in groups.items():
        values = [v for _a, _b, v in pairs]
        summaries[bucket] = {
            "n_pairs": float(len(values)),
            "mean": sum(values) / len(values) if values else 0.0,
            "min": min(values) if values else 0.0,
            "max": max(values) if values else 0.0,
        }
    return PairwiseVarianceReport(
        category,
        names[:n_human],
        names[n_human:],
        groups,
        summaries,
    )


def _group_name(group: ProfileGroup) -> str:
    ids = {profile.corpus_id for profile in group.values()}
    return "+".join(sorted(ids))


# --- emission -----------------------------------------------------------------

def _f(value: float) -> str:
    return f"{value:.6f}"


def _round6(value: float) -> float:
    return round(float(value), 6)


def emit(report, fmt: str, out_dir: str, prefix: Optional[str] = None) -> list[Path]:
    """Write a report to files; returns the paths written.

    Formats: ``csv`` (one or more tables), ``json`` (single document with
    a schema_version field), ``svg-scatter`` (PCA scatter; comparison
    reports only).  Identical reports emit byte-identical files.
    """
    if fmt not in REPORT_FORMATS:
        raise UnsupportedFormat(f"unknown format {fmt!r}; expected one of {REPORT_FORMATS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(report, ComparisonReport):
        return _emit_comparison(report, fmt, out, prefix or f"compare_{report.category.value}")
    if isinstance(report, FrequencyComparison):
        if fmt == "svg-scatter":
            raise UnsupportedFormat("frequency comparisons have no scatter rendering")
        return _emit_frequency(report, fmt, out, prefix or f"frequency_{report.category.value}")
    if isinstance(report, PairwiseVarianceReport):
        if fmt == "svg-scatter":
            raise UnsupportedFormat("pairwise variance reports have no scatter rendering")
        return _emit_pairwise(report, fmt, out, prefix or f"pairwise_{report.category.value}")
    raise UnsupportedFormat(f"cannot emit {type(report).__name__}")


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def _emit_comparison(report: ComparisonReport, fmt: str, out: Path, prefix: str) -> list[Path]:
    if fmt == "csv":
        matrix_path = out / f"{prefix}_matrix.csv"
        write_csv(
            matrix_path,
            ["corpus"] + report.corpus_ids,
            [
                [cid] + [_f(report.matrix[i, j]) for j in range(len(report.corpus_ids))]
                for i, cid in enumerate(report.corpus_ids)
            ],
        )
        pairs_path = out / f"{prefix}_pairs.csv"
        write_csv(
            pairs_path,
            ["corpus_a", "corpus_b", "cosine"],
            [[a, b, _f(v)] for a, b, v in report.pairs],
        )
        written = [matrix_path, pairs_path]
        if report.pca is not None:
            pca_path = out / f"{prefix}_pca.csv"
            write_csv(
                pca_path,
                ["corpus", "pc1", "pc2"],
                [
                    [cid, _f(report.pca.coordinates[i, 0]), _f(report.pca.coordinates[i, 1])]
                    for i, cid in enumerate(report.corpus_ids)
                ],
            )
            written.append(pca_path)
        return written
    if fmt == "json":
        payload = {
            "kind": "comparison",
            "category": report.category.value,
            "corpora": report.corpus_ids,
            "cosine_matrix": [[_round6(v) for v in row] for row in report.matrix.tolist()],
            "pairs": [
                {"corpus_a": a, "corpus_b": b, "cosine": _round6(v)}
                for a, b, v in report.pairs
            ],
        }
        if report.pca is not None:
            payload["pca"] = {
                "coordinates": [
                    [_round6(x), _round6(y)] for x, y in report.pca.coordinates.tolist()
                ],
                "explained_variance": [_round6(v) for v in report.pca.explained_variance],
                "degenerate_rank": report.pca.degenerate_rank,
            }
        path = out / f"{prefix}.json"
        _write_json(path, payload)
        return [path]
    # svg-scatter
    if report.pca is None:
        raise UnsupportedFormat("scatter rendering needs PCA coordinates (>= 3 corpora)")
    path = out / f"{prefix}_pca.svg"
    path.write_text(
        _scatter_svg(report.corpus_ids, report.pca), encoding="utf-8"
    )
    return [path]


def _scatter_svg(labels: Sequence[str], projection: Pca2Result) -> str:
    width, height, margin = 640.0, 480.0, 60.0
    xs = projection.coordinates[:, 0]
    ys = projection.coordinates[:, 1]
    spans = []
    for values in (xs, ys):
        low, high = float(values.min()), float(values.max())
        if high - low < 1e-12:
            low, high = low - 1.0, high + 1.0
        spans.append((low, high))
    (x_lo, x_hi), (y_lo, y_hi) = spans

    def sx(v: float) -> float:
        return margin + (v - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(v: float) -> float:
        return height - margin - (v - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{margin:.2f}" y1="{height - margin:.2f}" x2="{width - margin:.2f}" '
        f'y2="{height - margin:.2f}" stroke="black"/>',
        f'<line x1="{margin:.2f}" y1="{margin:.2f}" x2="{margin:.2f}" '
        f'y2="{height - margin:.2f}" stroke="black"/>',
        f'<text x="{width / 2:.2f}" y="{height - margin / 4:.2f}" text-anchor="middle" '
        f'font-size="12">PC1 (variance {_f(projection.explained_variance[0])})</text>',
        f'<text x="{margin / 4:.2f}" y="{height / 2:.2f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 {margin / 4:.2f} {height / 2:.2f})">'
        f'PC2 (variance {_f(projection.explained_variance[1])})</text>',
    ]
    for label, x, y in zip(labels, xs, ys):
        px, py = sx(float(x)), sy(float(y))
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="steelblue"/>')
        parts.append(
            f'<text x="{px:.2f}" y="{py - 8:.2f}" text-anchor="middle" '
            f'font-size="11">{_xml_escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _emit_frequency(report: FrequencyComparison, fmt: str, out: Path, prefix: str) -> list[Path]:
    if fmt == "csv":
        header = (
            ["identifier"]
            + [f"rel:{cid}" for cid in report.human_ids]
            + ["rel:llm_mean"]
            + [f"rel:{cid}" for cid in report.llm_ids]
            + [f"rate:{cid}" for cid in report.human_ids]
            + ["rate:llm_mean"]
            + [f"rate:{cid}" for cid in report.llm_ids]
            + ["human_count", "llm_count_mean"]
        )
        rows = []
        for row in report.rows:
            rows.append(
                [row.identifier]
                + [_f(v) for v in row.human_rel]
                + [_f(row.llm_rel_mean)]
                + [_f(v) for v in row.llm_rel]
                + [_f(v) for v in row.human_rate]
                + [_f(row.llm_rate_mean)]
                + [_f(v) for v in row.llm_rate]
                + [str(row.human_count), _f(row.llm_count_mean)]
            )
        path = out / f"{prefix}.csv"
        write_csv(path, header, rows)
        return [path]
    payload = {
        "kind": "frequency-comparison",
        "category": report.category.value,
        "human_corpora": report.human_ids,
        "llm_corpora": report.llm_ids,
        "rows": [
            {
                "identifier": row.identifier,
                "human_rel": [_round6(v) for v in row.human_rel],
                "llm_rel": [_round6(v) for v in row.llm_rel],
                "llm_rel_mean": _round6(row.llm_rel_mean),
                "human_rate": [_round6(v) for v in row.human_rate],
                "llm_rate": [_round6(v) for v in row.llm_rate],
                "llm_rate_mean": _round6(row.llm_rate_mean),
                "human_count": row.human_count,
                "llm_count_mean": _round6(row.llm_count_mean),
            }
            for row in report.rows
        ],
    }
    path = out / f"{prefix}.json"
    _write_json(path, payload)
    return [path]


def _emit_pairwise(report: PairwiseVarianceReport, fmt: str, out: Path, prefix: str) -> list[Path]:
    if fmt == "csv":
        pairs_path = out / f"{prefix}_pairs.csv"
        rows = []
        for bucket in PAIR_GROUPS:
            for a, b, v in report.groups[bucket]:
                rows.append([bucket, a, b, _f(v)])
        write_csv(pairs_path, ["group", "corpus_a", "corpus_b", "cosine"], rows)
        summary_path = out / f"{prefix}_summary.csv"
        write_csv(
            summary_path,
            ["group", "n_pairs", "mean", "min", "max"],
            [
                [
                    bucket,
                    str(int(report.summaries[bucket]["n_pairs"])),
                    _f(report.summaries[bucket]["mean"]),
                    _f(report.summaries[bucket]["min"]),
                    _f(report.summaries[bucket]["max"]),
                ]
                for bucket in PAIR_GROUPS
            ],
        )
        return [pairs_path, summary_path]
    payload = {
        "kind": "pairwise-variance",
        "category": report.category.value,
        "authors": report.author_ids,
        "llms": report.llm_ids,
        "groups": {
            bucket: [
                {"corpus_a": a, "corpus_b": b, "cosine": _round6(v)}
                for a, b, v in report.groups[bucket]
            ]
            for bucket in PAIR_GROUPS
        },
        "summaries": {
            bucket: {k: _round6(v) for k, v in report.summaries[bucket].items()}
            for bucket in PAIR_GROUPS
        },
    }
    path = out / f"{prefix}.json"
    _write_json(path, payload)
    return [path]
