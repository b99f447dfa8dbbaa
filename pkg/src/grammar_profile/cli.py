"""Command-line pipeline: ingest corpora, then run the analyses.

Every command takes a JSON run configuration (see FORMATS.md) plus a few
overriding flags.  ``ingest`` parses the corpora and grammar once and
writes caches under ``<out>/cache``; the analysis commands read those
caches and write reports under ``<out>/reports``.  With a fixed config
and seed the whole output tree is byte-reproducible.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import json
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import click

from . import derivation, profiles, report, stats
from .errors import ConfigError, GrammarProfileError, MissingCache, StaleCache
from .hierarchy import (
    ANALYSIS_CATEGORIES,
    Category,
    TypeHierarchy,
    grammar_checksum,
    parse_tdl,
    tally_categories,
)
from .profiles import CorpusCache, FrequencyProfile, SamplePlan
from .rng import derive_seed

NO_GRAMMAR_CHECKSUM = "no-grammar"
ROLES = ("human", "llm")


@dataclass
class CorpusSpec:
    corpus_id: str
    path: str
    fmt: str
    role: str


@dataclass
class RunConfig:
    """One reproducible run: corpora, grammar, analysis knobs, output."""

    corpora: list[CorpusSpec]
    grammar_files: list[str] = field(default_factory=list)
    lexicon_files: list[str] = field(default_factory=list)
    out_dir: str = "out"
    seed: int = 1
    categories: list[Category] = field(default_factory=lambda: list(ANALYSIS_CATEGORIES))
    sample_size: int = 25_000
    replacement: bool = False
    resamples: int = 10_000
    alpha: float = 0.05
    fdr_m: Optional[int] = None
    mwu_group_a: Optional[list[str]] = None
    mwu_group_b: Optional[list[str]] = None
    min_sentences: int = 101
    top_k: int = 50

    def validate(self) -> None:
        if not self.corpora:
            raise ConfigError("at least one corpus is required")
        ids = [c.corpus_id for c in self.corpora]
        if len(set(ids)) != len(ids):
            raise ConfigError("corpus ids must be unique")
        for spec in self.corpora:
            if spec.role not in ROLES:
                raise ConfigError(f"corpus {spec.corpus_id!r}: role must be one of {ROLES}")
            if spec.fmt not in derivation.CORPUS_FORMATS:
                raise ConfigError(
                    f"corpus {spec.corpus_id!r}: format must be one of {derivation.CORPUS_FORMATS}"
                )
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError("alpha must lie strictly between 0 and 1")
        for group in (self.mwu_group_a, self.mwu_group_b):
            if group:
                unknown = set(group) - set(ids)
                if unknown:
                    raise ConfigError(f"unknown corpus ids in test grouping: {sorted(unknown)}")

    def ids_with_role(self, role: str) -> list[str]:
        return [c.corpus_id for c in self.corpora if c.role == role]

    @property
    def cache_dir(self) -> Path:
        return Path(self.out_dir) / "cache"

    @property
    def report_dir(self) -> Path:
        return Path(self.out_dir) / "reports"


def load_config(path: str) -> RunConfig:
    """Parse the JSON run configuration; paths resolve against its folder."""
    config_path = Path(path)
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON ({err.msg})") from err
    base = config_path.parent

    def _resolve(p: str) -> str:
        candidate = Path(p)
        return str(candidate if candidate.is_absolute() else base / candidate)

    try:
        corpora = [
            CorpusSpec(
                corpus_id=str(entry["id"]),
                path=_resolve(entry["path"]),
                fmt=entry.get("format", "udf-lines"),
                role=entry.get("role", "human"),
            )
            for entry in raw["corpora"]
        ]
    except (KeyError, TypeError) as err:
        raise ConfigError(f"{path}: corpora entries need 'id' and 'path'") from err
    grammar = raw.get("grammar", {}) or {}
    analysis = raw.get("analysis", {}) or {}
    try:
        categories = [Category(c) for c in analysis.get("categories", [])] or list(
            ANALYSIS_CATEGORIES
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err
    config = RunConfig(
        corpora=corpora,
        grammar_files=[_resolve(p) for p in grammar.get("files", [])],
        lexicon_files=[_resolve(p) for p in grammar.get("lexicon", [])],
        out_dir=_resolve(raw.get("out", "out")),
        seed=int(raw.get("seed", 1)),
        categories=categories,
        sample_size=int(analysis.get("sample_size", 25_000)),
        replacement=bool(analysis.get("replacement", False)),
        resamples=int(analysis.get("resamples", 10_000)),
        alpha=float(analysis.get("alpha", 0.05)),
        fdr_m=analysis.get("fdr_m"),
        mwu_group_a=analysis.get("mwu_group_a"),
        mwu_group_b=analysis.get("mwu_group_b"),
        min_sentences=int(analysis.get("min_sentences", 101)),
        top_k=int(analysis.get("top_k", 50)),
    )
    config.validate()
    return config


def _load(config_path: str, out_dir: Optional[str], seed: Optional[int] = None) -> RunConfig:
    """load_config plus the common CLI overrides."""
    config = load_config(config_path)
    if out_dir is not None:
        config.out_dir = out_dir
    if seed is not None:
        config.seed = seed
    return config


def _worker_count(n_jobs: int) -> int:
    cap = os.environ.get("GRAMMAR_PROFILE_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_jobs, limit))


def _load_hierarchy(config: RunConfig) -> tuple[Optional[TypeHierarchy], str]:
    if not config.grammar_files:
        return None, NO_GRAMMAR_CHECKSUM
    hierarchy = parse_tdl(config.grammar_files, lexicon=config.lexicon_files)
    return hierarchy, hierarchy.source_checksum


def _grammar_checksum(config: RunConfig) -> str:
    if not config.grammar_files:
        return NO_GRAMMAR_CHECKSUM
    return grammar_checksum(config.grammar_files)


def _corpus_cache_path(config: RunConfig, corpus_id: str) -> Path:
    return config.cache_dir / f"{corpus_id}.corpus.json.gz"


def _profile_cache_path(config: RunConfig, corpus_id: str, category: Category) -> Path:
    return config.cache_dir / f"{corpus_id}.{category.value}.profile.json.gz"


def _load_corpus_caches(config: RunConfig, checksum: str) -> dict[str, CorpusCache]:
    caches = {}
    for spec in config.corpora:
        path = _corpus_cache_path(config, spec.corpus_id)
        try:
            caches[spec.corpus_id] = profiles.load_corpus_cache(str(path), checksum)
        except FileNotFoundError as err:
            raise MissingCache(
                f"no cache for corpus {spec.corpus_id!r}; run `grammar-profile ingest` first"
            ) from err
        except StaleCache as err:
            raise MissingCache(str(err)) from err
    return caches


def _load_profiles(
    config: RunConfig, checksum: str, categories: list[Category]
) -> dict[str, dict[Category, FrequencyProfile]]:
    table: dict[str, dict[Category, FrequencyProfile]] = {}
    for spec in config.corpora:
        table[spec.corpus_id] = {}
        for category in categories:
            path = _profile_cache_path(config, spec.corpus_id, category)
            try:
                table[spec.corpus_id][category] = profiles.load_profile_cache(
                    str(path), checksum
                )
            except FileNotFoundError as err:
                raise MissingCache(
                    f"no {category.value} profile for corpus {spec.corpus_id!r};"
                    " run `grammar-profile ingest` first"
                ) from err
            except StaleCache as err:
                raise MissingCache(str(err)) from err
    return table


def _category_option(default: Optional[str] = None):
    choices = [c.value for c in ANALYSIS_CATEGORIES] + [Category.ALL.value]
    return click.option(
        "--category",
        "category",
        type=click.Choice(choices),
        default=default,
        help="restrict the analysis to one category",
    )


@click.group(help=__doc__)
def cli() -> None:
    pass


@cli.command("ingest")
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@click.option("--lenient", is_flag=True, help="skip unparseable lines instead of failing")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="override the configured output directory")
def cmd_ingest(config_path: str, lenient: bool, out_dir: Optional[str]) -> None:
    """Parse corpora and grammar; write profile and sentence caches."""
    config = _load(config_path, out_dir)
    hierarchy, checksum = _load_hierarchy(config)
    config.cache_dir.mkdir(parents=True, exist_ok=True)

    def _ingest_one(spec: CorpusSpec):
        skipped: list[tuple[int, str]] = []
        records = derivation.read_corpus(
            spec.path, spec.fmt, corpus_id=spec.corpus_id, lenient=lenient, skipped=skipped
        )
        return spec, records, skipped

    results = []
    with ThreadPoolExecutor(max_workers=_worker_count(len(config.corpora))) as pool:
        for spec, records, skipped in pool.map(_ingest_one, config.corpora):
            results.append((spec, records, skipped))

    for spec, records, skipped in results:
        cache = profiles.cache_from_records(spec.corpus_id, records, hierarchy)
        profiles.save_corpus_cache(
            cache, str(_corpus_cache_path(config, spec.corpus_id)), checksum
        )
        unknown = 0
        observed: set[str] = set()
        for sentence in cache.sentences:
            unknown += len(sentence.labels.get(Category.UNKNOWN, ()))
            for labels in sentence.labels.values():
                observed.update(labels)
        for category in ANALYSIS_CATEGORIES:
            profile = cache.profile(category)
            profiles.save_profile_cache(
                profile,
                str(_profile_cache_path(config, spec.corpus_id, category)),
                checksum,
            )
        tally = tally_categories(observed, hierarchy)
        click.echo(
            f"{spec.corpus_id}: {len(records)} sentences"
            f" ({len(skipped)} skipped), {unknown} unclassified occurrences;"
            " distinct identifiers: "
            + ", ".join(
                f"{category.value}={tally[category]}" for category in ANALYSIS_CATEGORIES
            )
        )
        for line_no, message in skipped:
            click.echo(f"  skipped line {line_no}: {message}", err=True)


@cli.command("compare")
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@_category_option()
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="override the configured output directory")
def cmd_compare(config_path: str, category: Optional[str], out_dir: Optional[str]) -> None:
    """Cosine-similarity matrices with PCA projection, per category."""
    config = _load(config_path, out_dir)
    checksum = _grammar_checksum(config)
    wanted = [Category(category)] if category else config.categories
    table = _load_profiles(config, checksum, wanted)
    config.report_dir.mkdir(parents=True, exist_ok=True)
    for cat in wanted:
        ordered = [table[spec.corpus_id][cat] for spec in config.corpora]
        comparison = report.build_comparison(ordered, cat)
        written = report.emit(comparison, "csv", str(config.report_dir))
        written += report.emit(comparison, "json", str(config.report_dir))
        if comparison.pca is not None:
            written += report.emit(comparison, "svg-scatter", str(config.report_dir))
        for path in written:
            click.echo(f"wrote {path}")


@cli.command("diversity")
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@click.option("--test/--no-test", "run_test", default=True,
              help="also run the human-vs-LLM permutation test")
@click.option("--resamples", type=int, default=None, help="permutation resamples")
@click.option("--seed", type=int, default=None, help="override the configured seed")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="override the configured output directory")
def cmd_diversity(
    config_path: str, run_test: bool, resamples: Optional[int], seed: Optional[int],
    out_dir: Optional[str],
) -> None:
    """Shannon entropy (nats) and Gini-Simpson index per corpus and category."""
    config = _load(config_path, out_dir, seed)
    checksum = _grammar_checksum(config)
    table = _load_profiles(config, checksum, config.categories)
    config.report_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for spec in config.corpora:
        for cat in config.categories:
            profile = table[spec.corpus_id][cat]
            if profile.total == 0:
                continue
            score = stats.diversity(profile)
            rows.append(
                [
                    spec.corpus_id,
                    cat.value,
                    str(len(profile.support)),
                    str(profile.total),
                    f"{score.shannon_H:.6f}",
                    f"{score.gini_simpson:.6f}",
                ]
            )
    diversity_path = config.report_dir / "diversity.csv"
    report.write_csv(
        diversity_path,
        ["corpus", "category", "support", "occurrences", "shannon_nats", "gini_simpson"],
        rows,
    )
    click.echo(f"wrote {diversity_path}")

    if not run_test:
        return
    humans = config.ids_with_role("human")
    llms = config.ids_with_role("llm")
    if not humans or not llms:
        click.echo("permutation test skipped: need both human and llm corpora", err=True)
        return
    caches = _load_corpus_caches(config, checksum)
    test_rows = []
    for cat in config.categories:
        sentences_a = [s for cid in humans for s in caches[cid].label_lists(cat)]
        sentences_b = [s for cid in llms for s in caches[cid].label_lists(cat)]
        for statistic in stats.PERMUTATION_STATISTICS:
            result = stats.permutation_test(
                sentences_a,
                sentences_b,
                statistic=statistic,
                resamples=resamples or config.resamples,
                seed=derive_seed(config.seed, "diversity", cat.value, statistic),
            )
            test_rows.append(
                [
                    cat.value,
                    statistic,
                    f"{result.statistic:.6f}",
                    f"{result.p_value:.6f}",
                    result.method,
                ]
            )
    tests_path = config.report_dir / "diversity_tests.csv"
    report.write_csv(
        tests_path,
        ["category", "statistic", "observed_diff", "p_value", "method"],
        test_rows,
    )
    click.echo(f"wrote {tests_path}")


@cli.command("signif")
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@_category_option()
@click.option("--fdr-m", type=int, default=None,
              help="total comparisons performed, for the FDR adjustment")
@click.option("--alpha", type=float, default=None, help="significance threshold")
@click.option("--seed", type=int, default=None, help="override the configured seed")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="override the configured output directory")
def cmd_signif(
    config_path: str,
    category: Optional[str],
    fdr_m: Optional[int],
    alpha: Optional[float],
    seed: Optional[int],
    out_dir: Optional[str],
) -> None:
    """Per-identifier Mann-Whitney U tests with Benjamini-Hochberg FDR.

    The two samples are the identifier's relative frequencies across the
    corpora of group A and group B (configured, defaulting to the
    human-role vs llm-role corpora).
    """
    config = _load(config_path, out_dir, seed)
    alpha = alpha if alpha is not None else config.alpha
    checksum = _grammar_checksum(config)
    wanted = [Category(category)] if category else config.categories
    table = _load_profiles(config, checksum, wanted)
    group_a = config.mwu_group_a or config.ids_with_role("human")
    group_b = config.mwu_group_b or config.ids_with_role("llm")
    if not group_a or not group_b:
        raise ConfigError("significance testing needs corpora in both groups")
    config.report_dir.mkdir(parents=True, exist_ok=True)

    for cat in wanted:
        profiles_a = [table[cid][cat] for cid in group_a]
        profiles_b = [table[cid][cat] for cid in group_b]
        identifiers = sorted(
            set().union(*(p.support for p in profiles_a + profiles_b))
        )
        exact_ok = len(group_a) + len(group_b) <= stats.EXACT_POOL_LIMIT
        results = []
        pooled_counts = {}
        for ident in identifiers:
            xs = [p.rel_freq.get(ident, 0.0) for p in profiles_a]
            ys = [p.rel_freq.get(ident, 0.0) for p in profiles_b]
            pooled_counts[ident] = sum(
                p.counts.get(ident, 0) for p in profiles_a + profiles_b
            )
            if exact_ok:
                result = stats.mann_whitney(xs, ys, mode="exact", key=ident)
            else:
                result = stats.mann_whitney(
                    xs,
                    ys,
                    mode="mc",
                    resamples=config.resamples,
                    seed=derive_seed(config.seed, "signif", cat.value, ident),
                    key=ident,
                )
            results.append(result)
        m = fdr_m if fdr_m is not None else config.fdr_m
        adjusted = stats.apply_bh(results, m=m)
        adjusted.sort(key=lambda r: (r.p_value, r.key))
        out_path = config.report_dir / f"signif_{cat.value}.csv"
        report.write_csv(
            out_path,
            ["identifier", "pooled_count", "u_statistic", "p_value", "p_adjusted",
             "significant_at_alpha"],
            [
                [
                    r.key,
                    str(pooled_counts[r.key]),
                    f"{r.statistic:.6f}",
                    f"{r.p_value:.6f}",
                    f"{r.p_adjusted:.6f}",
                    str(r.p_adjusted <= alpha).lower(),
                ]
                for r in adjusted
            ],
        )
        raw_hits = sum(1 for r in adjusted if r.p_value <= alpha)
        fdr_hits = sum(1 for r in adjusted if r.p_adjusted <= alpha)
        click.echo(
            f"{cat.value}: {len(adjusted)} identifiers tested,"
            f" {raw_hits} with p <= {alpha:g},"
            f" {fdr_hits} significant after FDR (m={m or len(adjusted)})"
        )
        click.echo(f"wrote {out_path}")


@cli.command("unique")
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@_category_option()
@click.option("--sample-size", type=int, default=None, help="sentences per sample")
@click.option("--min-count", type=int, default=1,
              help="minimum count on the 'only in' side")
@click.option("--max-other", type=int, default=0,
              help="maximum count on the other side")
@click.option("--top", "top_n", type=int, default=15, help="rows per ranked table")
@click.option("--seed", type=int, default=None, help="override the configured seed")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="override the configured output directory")
def cmd_unique(
    config_path: str,
    category: Optional[str],
    sample_size: Optional[int],
    min_count: int,
    max_other: int,
    top_n: int,
    seed: Optional[int],
    out_dir: Optional[str],
) -> None:
    """Identifiers (nearly) unique to one side, on matched-size samples.

    The default min-count/max-other of 1/0 gives strict uniqueness tables;
    use e.g. --min-count 11 --max-other 1 for the long-tail query (over 10
    occurrences on one side, at most 1 on the other).
    """
    config = _load(config_path, out_dir, seed)
    checksum = _grammar_checksum(config)
    caches = _load_corpus_caches(config, checksum)
    humans = config.ids_with_role("human")
    llms = config.ids_with_role("llm")
    if not humans or not llms:
        raise ConfigError("uniqueness tables need both human and llm corpora")
    wanted = [Category(category)] if category else [
        Category.LEXICAL_TYPE,
        Category.LEXICAL_ENTRY,
    ]
    size = sample_size if sample_size is not None else config.sample_size
    config.report_dir.mkdir(parents=True, exist_ok=True)

    human_sentences = [
        (cid, sentence) for cid in humans for sentence in caches[cid].sentences
    ]
    targets = [(cid, [(cid, s) for s in caches[cid].sentences]) for cid in llms]
    if len(llms) > 1:
        targets.append(
            ("all_llms", [(cid, s) for cid in llms for s in caches[cid].sentences])
        )

    def _draw(pool, stream_tag):
        plan = SamplePlan(
            sample_size=min(size, len(pool)),
            seed=derive_seed(config.seed, "unique", stream_tag),
            replacement=config.replacement,
        )
        return profiles.sample_corpus(
            pool, plan, key=lambda entry: (entry[0], entry[1].item_id)
        )

    def _sample_profile(sample, corpus_id, cat):
        label_lists = [
            s.labels.get(cat, []) if cat is not Category.ALL
            else [l for ls in s.labels.values() for l in ls]
            for _cid, s in sample
        ]
        return profiles.profile_from_label_lists(label_lists, corpus_id, cat)

    # one human sample, compared against every llm target
    human_sample = _draw(human_sentences, "human")

    summary_rows = []
    written = []
    for target_id, target_sentences in targets:
        target_sample = _draw(target_sentences, target_id)
        for cat in wanted:
            human_profile = _sample_profile(human_sample, "human", cat)
            llm_profile = _sample_profile(target_sample, target_id, cat)
            not_in, only_in = profiles.not_in_only_in(human_profile, llm_profile)
            summary_rows.append(
                [target_id, cat.value, str(not_in), str(only_in),
                 str(human_profile.sentence_count)]
            )
            for direction, a, b in (
                ("human_only", human_profile, llm_profile),
                ("llm_only", llm_profile, human_profile),
            ):
                ranked = profiles.diff_items(a, b, min_count, max_other)[:top_n]
                path = config.report_dir / f"unique_{target_id}_{cat.value}_{direction}.csv"
                report.write_csv(
                    path, ["identifier", "count"], [[i, str(c)] for i, c in ranked]
                )
                written.append(path)
    summary_path = config.report_dir / "unique_summary.csv"
    report.write_csv(
        summary_path,
        ["llm_corpus", "category", "not_in_llm", "only_in_llm", "sample_sentences"],
        summary_rows,
    )
    for path in [summary_path] + written:
        click.echo(f"wrote {path}")


@cli.command("pairwise")
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@_category_option(default=Category.ALL.value)
@click.option("--min-sentences", type=int, default=None,
              help="author inclusion threshold (sentences)")
@click.option("--balance-sentences", type=int, default=None,
              help="sample each LLM corpus down to this many sentences")
@click.option("--global-normalization", is_flag=True,
              help="normalize all-category vectors by the grand total instead of per block")
@click.option("--seed", type=int, default=None, help="override the configured seed")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="override the configured output directory")
def cmd_pairwise(
    config_path: str,
    category: str,
    min_sentences: Optional[int],
    balance_sentences: Optional[int],
    global_normalization: bool,
    seed: Optional[int],
    out_dir: Optional[str],
) -> None:
    """Author-vs-author vs author-vs-LLM cosine distributions."""
    config = _load(config_path, out_dir, seed)
    checksum = _grammar_checksum(config)
    caches = _load_corpus_caches(config, checksum)
    humans = config.ids_with_role("human")
    llms = config.ids_with_role("llm")
    threshold = min_sentences if min_sentences is not None else config.min_sentences
    cat = Category(category)

    author_sentences = [
        s for cid in humans for s in caches[cid].sentences
    ]
    author_groups = profiles.group_by_author(author_sentences, threshold)

    def _profile_group(name: str, sentences) -> dict[Category, FrequencyProfile]:
        group = {}
        for c in ANALYSIS_CATEGORIES:
            label_lists = [s.labels.get(c, []) for s in sentences]
            if any(label_lists):
                group[c] = profiles.profile_from_label_lists(label_lists, name, c)
        return group

    author_entries = []
    for author, sentences in author_groups.items():
        group = _profile_group(author, sentences)
        author_entries.append(group if cat is Category.ALL else group.get(cat))

    llm_entries = []
    for cid in llms:
        sentences = caches[cid].sentences
        if balance_sentences is not None:
            plan = SamplePlan(
                sample_size=min(balance_sentences, len(sentences)),
                seed=derive_seed(config.seed, "pairwise", cid),
                replacement=False,
            )
            sentences = profiles.sample_corpus(
                sentences, plan, key=lambda s: s.item_id
            )
        group = _profile_group(cid, sentences)
        llm_entries.append(group if cat is Category.ALL else group.get(cat))

    if cat is not Category.ALL:
        author_entries = [p for p in author_entries if p is not None]
        llm_entries = [p for p in llm_entries if p is not None]

    pairwise = report.build_pairwise_variance(
        author_entries,
        llm_entries,
        category=cat,
        block_normalization=not global_normalization,
    )
    config.report_dir.mkdir(parents=True, exist_ok=True)
    written = report.emit(pairwise, "csv", str(config.report_dir))
    written += report.emit(pairwise, "json", str(config.report_dir))
    for path in written:
        click.echo(f"wrote {path}")


@cli.command("frequency")
@click.option("--config", "-c", "config_path", required=True, type=click.Path(exists=True))
@_category_option(default=Category.SYNTACTIC_CONSTRUCTION.value)
@click.option("--top", "top_n", type=int, default=None, help="identifiers to include")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="override the configured output directory")
def cmd_frequency(
    config_path: str, category: str, top_n: Optional[int], out_dir: Optional[str]
) -> None:
    """Per-identifier frequency comparison rows (human dots vs LLM bar)."""
    config = _load(config_path, out_dir)
    checksum = _grammar_checksum(config)
    cat = Category(category)
    table = _load_profiles(config, checksum, [cat])
    humans = config.ids_with_role("human")
    llms = config.ids_with_role("llm")
    comparison = report.build_frequency_comparison(
        [table[cid][cat] for cid in humans],
        [table[cid][cat] for cid in llms],
        top_k=top_n if top_n is not None else config.top_k,
    )
    config.report_dir.mkdir(parents=True, exist_ok=True)
    written = report.emit(comparison, "csv", str(config.report_dir))
    written += report.emit(comparison, "json", str(config.report_dir))
    for path in written:
        click.echo(f"wrote {path}")


def main(argv: Optional[list[str]] = None) -> int:
    """Console entry point mapping errors to documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as err:
        err.show()
        return 1
    except click.ClickException as err:
        err.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except (GrammarProfileError, OSError) as err:
        click.echo(f"error: {err}", err=True)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
