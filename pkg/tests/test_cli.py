import csv
import json
import math
from pathlib import Path

import pytest

from grammar_profile.cli import main

from conftest import DATA_DIR


def write_config(tmp_path, corpora, out="out", grammar=True, **analysis):
    config = {
        "out": str(tmp_path / out),
        "seed": 777,
        "corpora": corpora,
        "analysis": {
            "categories": ["construction", "lexical_rule", "lexical_type", "lexical_entry"],
            "resamples": 400,
            "sample_size": 100,
            "min_sentences": 2,
            **analysis,
        },
    }
    if grammar:
        config["grammar"] = {
            "files": [
                str(DATA_DIR / "grammar" / "types.tdl"),
                str(DATA_DIR / "grammar" / "lexicon.tdl"),
            ],
            "lexicon": [str(DATA_DIR / "grammar" / "lexicon.tdl")],
        }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return str(path)


def fixture_corpora():
    return [
        {"id": "nyt_mini", "path": str(DATA_DIR / "authors.jsonl"), "format": "jsonl",
         "role": "human"},
        {"id": "llm_b", "path": str(DATA_DIR / "fixture_b.udf"), "format": "udf-lines",
         "role": "llm"},
        {"id": "llm_c", "path": str(DATA_DIR / "fixture_c.udf"), "format": "udf-lines",
         "role": "llm"},
    ]


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


@pytest.fixture()
def ingested(tmp_path):
    config = write_config(tmp_path, fixture_corpora())
    assert main(["ingest", "-c", config]) == 0
    return config, tmp_path


class TestIngest:
    def test_writes_profile_and_corpus_caches(self, tmp_path, capsys):
        config = write_config(tmp_path, fixture_corpora())
        assert main(["ingest", "-c", config]) == 0
        cache = tmp_path / "out" / "cache"
        profile_files = sorted(p.name for p in cache.glob("*.profile.json.gz"))
        assert len(profile_files) == 3 * 4  # corpora x analysis categories
        assert len(list(cache.glob("*.corpus.json.gz"))) == 3
        out = capsys.readouterr().out
        assert "nyt_mini: 16 sentences (0 skipped)" in out
        assert "llm_b: 15 sentences" in out

    def test_unknown_labels_counted(self, tmp_path, capsys):
        config = write_config(tmp_path, fixture_corpora())
        main(["ingest", "-c", config])
        out = capsys.readouterr().out
        # fixture_b contains one sentence with an unclassifiable preterminal
        assert "llm_b: 15 sentences (0 skipped), 1 unclassified occurrences" in out

    def test_lenient_skips_bad_line(self, tmp_path, capsys):
        broken = tmp_path / "broken.udf"
        good = '(1 cat_n1 0.0 0 1 ("cat"))'
        broken.write_text(f"{good}\n(1 oops\n{good[:-1]})\n", encoding="utf-8")
        corpora = [{"id": "x", "path": str(broken), "format": "udf-lines", "role": "human"}]
        config = write_config(tmp_path, corpora)
        assert main(["ingest", "-c", config, "--lenient"]) == 0
        captured = capsys.readouterr()
        assert "(1 skipped)" in captured.out

    def test_strict_mode_fails_on_bad_line(self, tmp_path, capsys):
        broken = tmp_path / "broken.udf"
        broken.write_text("(1 oops\n", encoding="utf-8")
        corpora = [{"id": "x", "path": str(broken), "format": "udf-lines", "role": "human"}]
        config = write_config(tmp_path, corpora)
        assert main(["ingest", "-c", config]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_thread_cap_respected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GRAMMAR_PROFILE_THREADS", "1")
        config = write_config(tmp_path, fixture_corpora())
        assert main(["ingest", "-c", config]) == 0

    def test_out_flag_overrides_config(self, tmp_path):
        config = write_config(tmp_path, fixture_corpora())
        elsewhere = tmp_path / "elsewhere"
        assert main(["ingest", "-c", config, "--out", str(elsewhere)]) == 0
        assert (elsewhere / "cache").exists()
        assert not (tmp_path / "out").exists()
        assert main(["compare", "-c", config, "--out", str(elsewhere),
                     "--category", "construction"]) == 0
        assert (elsewhere / "reports" / "compare_construction_matrix.csv").exists()


class TestExitCodes:
    def test_usage_error(self):
        assert main(["no-such-command"]) == 1

    def test_missing_cache_is_data_error(self, tmp_path, capsys):
        config = write_config(tmp_path, fixture_corpora())
        assert main(["compare", "-c", config]) == 2
        assert "ingest" in capsys.readouterr().err

    def test_duplicate_corpus_ids_rejected(self, tmp_path, capsys):
        corpora = fixture_corpora()
        corpora[1]["id"] = corpora[0]["id"]
        config = write_config(tmp_path, corpora)
        assert main(["ingest", "-c", config]) == 2
        assert "unique" in capsys.readouterr().err

    def test_bad_alpha_rejected(self, tmp_path):
        config = write_config(tmp_path, fixture_corpora(), alpha=1.5)
        assert main(["ingest", "-c", config]) == 2


class TestCompare:
    def test_reports_written(self, ingested):
        config, tmp_path = ingested
        assert main(["compare", "-c", config, "--category", "construction"]) == 0
        reports = tmp_path / "out" / "reports"
        matrix = read_rows(reports / "compare_construction_matrix.csv")
        assert [row["corpus"] for row in matrix] == ["nyt_mini", "llm_b", "llm_c"]
        assert matrix[0]["nyt_mini"] == "1.000000"
        assert (reports / "compare_construction.json").exists()
        assert (reports / "compare_construction_pca.svg").exists()

    def test_llm_corpora_cluster(self, ingested):
        config, tmp_path = ingested
        main(["compare", "-c", config, "--category", "construction"])
        pairs = read_rows(tmp_path / "out" / "reports" / "compare_construction_pairs.csv")
        assert {pairs[0]["corpus_a"], pairs[0]["corpus_b"]} == {"llm_b", "llm_c"}


class TestDiversity:
    def test_uniform_corpus_entropy_is_log_k(self, tmp_path):
        k = 16
        lines = [
            f'(1 u{i:02d}_c 0.0 0 1 (2 cat_n1 0.0 0 1 ("w")))' for i in range(k)
        ]
        udf = tmp_path / "uniform.udf"
        udf.write_text("\n".join(lines) + "\n", encoding="utf-8")
        corpora = [{"id": "uni", "path": str(udf), "format": "udf-lines", "role": "human"}]
        config = write_config(tmp_path, corpora, grammar=False)
        assert main(["ingest", "-c", config]) == 0
        assert main(["diversity", "-c", config, "--no-test"]) == 0
        rows = read_rows(tmp_path / "out" / "reports" / "diversity.csv")
        row = [r for r in rows if r["category"] == "construction"][0]
        assert float(row["shannon_nats"]) == pytest.approx(math.log(k), abs=1e-6)
        assert float(row["gini_simpson"]) == pytest.approx(1 - 1 / k, abs=1e-6)

    def test_permutation_rows_written(self, ingested):
        config, tmp_path = ingested
        assert main(["diversity", "-c", config, "--resamples", "99"]) == 0
        rows = read_rows(tmp_path / "out" / "reports" / "diversity_tests.csv")
        assert {r["statistic"] for r in rows} == {"shannon_diff", "gini_diff"}
        for row in rows:
            assert 1 / 100 <= float(row["p_value"]) <= 1.0


class TestSignif:
    def write_separated_config(self, tmp_path):
        # 3 human vs 6 llm corpora over two identifiers with fully separated
        # relative frequencies and no ties
        corpora = []
        for i in range(3):
            lines = []
            for _ in range(18 - i):
                lines.append('(1 stylep_c 0.0 0 1 (2 cat_n1 0.0 0 1 ("w")))')
            for _ in range(2 + i):
                lines.append('(1 plainp_c 0.0 0 1 (2 cat_n1 0.0 0 1 ("w")))')
            path = tmp_path / f"human{i}.udf"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            corpora.append(
                {"id": f"h{i}", "path": str(path), "format": "udf-lines", "role": "human"}
            )
        for j in range(6):
            lines = []
            for _ in range(2 + j):
                lines.append('(1 stylep_c 0.0 0 1 (2 cat_n1 0.0 0 1 ("w")))')
            for _ in range(18 - j):
                lines.append('(1 plainp_c 0.0 0 1 (2 cat_n1 0.0 0 1 ("w")))')
            path = tmp_path / f"llm{j}.udf"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            corpora.append(
                {"id": f"m{j}", "path": str(path), "format": "udf-lines", "role": "llm"}
            )
        return write_config(tmp_path, corpora, grammar=False)

    def test_three_vs_six_fully_separated(self, tmp_path, capsys):
        config = self.write_separated_config(tmp_path)
        assert main(["ingest", "-c", config]) == 0
        # m = 3x the number of tests performed (2 identifiers)
        assert main(
            ["signif", "-c", config, "--category", "construction", "--fdr-m", "6"]
        ) == 0
        rows = read_rows(tmp_path / "out" / "reports" / "signif_construction.csv")
        assert len(rows) == 2
        for row in rows:
            assert float(row["p_value"]) == pytest.approx(2 / 84, abs=1e-6)
            assert row["significant_at_alpha"] == "false"
        out = capsys.readouterr().out
        assert "0 significant after FDR" in out


class TestUnique:
    def test_summary_and_ranked_tables(self, ingested):
        config, tmp_path = ingested
        assert main(["unique", "-c", config, "--category", "lexical_entry"]) == 0
        reports = tmp_path / "out" / "reports"
        summary = read_rows(reports / "unique_summary.csv")
        targets = {row["llm_corpus"] for row in summary}
        assert targets == {"llm_b", "llm_c", "all_llms"}
        # law_n2 occurs only in the human fixture corpus
        human_only = read_rows(reports / "unique_all_llms_lexical_entry_human_only.csv")
        assert any(r["identifier"] == "law_n2" for r in human_only)
        llm_only = read_rows(reports / "unique_all_llms_lexical_entry_llm_only.csv")
        assert any(r["identifier"] == "num_ne" for r in llm_only)

    def test_long_tail_flags(self, ingested):
        config, tmp_path = ingested
        assert main(
            [
                "unique", "-c", config, "--category", "construction",
                "--min-count", "3", "--max-other", "1", "--top", "5",
            ]
        ) == 0
        path = tmp_path / "out" / "reports" / "unique_all_llms_construction_llm_only.csv"
        rows = read_rows(path)
        # complement chains pass the over-threshold / under-threshold filter
        assert any(r["identifier"] == "n-n_num-seq_c" for r in rows)


class TestPairwise:
    def test_groups_and_sizes(self, ingested):
        config, tmp_path = ingested
        assert main(["pairwise", "-c", config, "--min-sentences", "2"]) == 0
        reports = tmp_path / "out" / "reports"
        summary = {r["group"]: r for r in read_rows(reports / "pairwise_all_summary.csv")}
        assert int(summary["human-human"]["n_pairs"]) == 3   # C(3,2) authors
        assert int(summary["human-llm"]["n_pairs"]) == 6     # 3 authors x 2 llms
        assert int(summary["llm-llm"]["n_pairs"]) == 1
        pairs = read_rows(reports / "pairwise_all_pairs.csv")
        authors = {r["corpus_a"] for r in pairs if r["group"] == "human-human"}
        assert authors <= {"A. Smith", "B. Jones", "C. Wu"}

    def test_single_category_and_balance(self, ingested):
        config, tmp_path = ingested
        assert main(
            [
                "pairwise", "-c", config, "--category", "lexical_entry",
                "--min-sentences", "2", "--balance-sentences", "10",
            ]
        ) == 0
        assert (tmp_path / "out" / "reports" / "pairwise_lexical_entry_pairs.csv").exists()


class TestFrequency:
    def test_rows_written(self, ingested):
        config, tmp_path = ingested
        assert main(["frequency", "-c", config, "--top", "5"]) == 0
        rows = read_rows(tmp_path / "out" / "reports" / "frequency_construction.csv")
        assert len(rows) == 5
        assert "rel:llm_mean" in rows[0]


class TestDeterminism:
    def run_everything(self, tmp_path, out):
        tmp_path.mkdir(parents=True, exist_ok=True)
        config = write_config(tmp_path, fixture_corpora(), out=out, resamples=50)
        commands = [
            ["ingest", "-c", config],
            ["compare", "-c", config],
            ["diversity", "-c", config],
            ["signif", "-c", config],
            ["unique", "-c", config, "--category", "lexical_entry"],
            ["pairwise", "-c", config, "--min-sentences", "2"],
            ["frequency", "-c", config],
        ]
        for command in commands:
            assert main(command) == 0, command
        return tmp_path / out

    def tree_bytes(self, root: Path):
        return {
            str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*"))
            if p.is_file()
        }

    def test_identical_config_and_seed_give_identical_trees(self, tmp_path):
        first = self.run_everything(tmp_path / "one", out="out")
        second = self.run_everything(tmp_path / "two", out="out")
        assert self.tree_bytes(first) == self.tree_bytes(second)

    def test_commands_idempotent_over_unchanged_cache(self, ingested):
        config, tmp_path = ingested
        assert main(["compare", "-c", config]) == 0
        reports = tmp_path / "out" / "reports"
        before = {p.name: p.read_bytes() for p in reports.iterdir()}
        assert main(["compare", "-c", config]) == 0
        after = {p.name: p.read_bytes() for p in reports.iterdir()}
        assert before == after

    def test_stale_cache_detected_after_grammar_change(self, tmp_path):
        grammar = tmp_path / "g.tdl"
        grammar.write_text("a_c := phrase.\nphrase := top_g.\n", encoding="utf-8")
        corpora = [
            {"id": "x", "path": str(DATA_DIR / "fixture_a.udf"), "format": "udf-lines",
             "role": "human"},
            {"id": "y", "path": str(DATA_DIR / "fixture_b.udf"), "format": "udf-lines",
             "role": "llm"},
        ]
        config_obj = {
            "out": str(tmp_path / "out"),
            "seed": 1,
            "grammar": {"files": [str(grammar)]},
            "corpora": corpora,
        }
        config = tmp_path / "config.json"
        config.write_text(json.dumps(config_obj), encoding="utf-8")
        assert main(["ingest", "-c", str(config)]) == 0
        grammar.write_text("a_c := phrase2.\nphrase2 := top_g.\n", encoding="utf-8")
        assert main(["compare", "-c", str(config)]) == 2
