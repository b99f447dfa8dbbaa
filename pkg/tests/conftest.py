"""Shared fixtures: deterministic random trees, DAGs, and scan oracles."""

from __future__ import annotations

import re
from pathlib import Path

import pytest

from grammar_profile.derivation import DerivationNode
from grammar_profile.hierarchy import parse_tdl
from grammar_profile.rng import SplitMix64

DATA_DIR = Path(__file__).parent / "data"

_INTERNAL_LABELS = [
    "sb-hd_mc_c", "hd-cmp_u_c", "hdn_bnp_c", "sp-hd_n_c", "aj-hdn_norm_c",
    "n_pl_olr", "v_pst_olr", "v_nger-tr_dlr", "n_-_mc_le", "v_np_le",
]
_ENTRY_LABELS = ["cat_n1", "dog_n1", "sleep_v1", "law_n2", "the_1", "big_a1"]
_SURFACES = [
    "cats", "sleep", "the", 'say "hi"', "back\\slash", "café", "don't", "42",
]
_SCORES = [0.0, -0.25, -0.5, -1.75, -2.0, 0.125]


def random_tree(seed: int, max_depth: int = 4) -> DerivationNode:
    """Span-consistent random derivation tree, deterministic in the seed."""
    rng = SplitMix64(seed)

    def gen(start: int, depth: int) -> DerivationNode:
        if depth >= max_depth or rng.randbelow(3) == 0:
            label = _ENTRY_LABELS[rng.randbelow(len(_ENTRY_LABELS))]
            surface = _SURFACES[rng.randbelow(len(_SURFACES))]
            score = _SCORES[rng.randbelow(len(_SCORES))]
            return DerivationNode(0, label, score, start, start + 1, [], surface)
        kids = []
        cursor = start
        for _ in range(1 + rng.randbelow(3)):
            kid = gen(cursor, depth + 1)
            kids.append(kid)
            cursor = kid.span_end
        label = _INTERNAL_LABELS[rng.randbelow(len(_INTERNAL_LABELS))]
        score = _SCORES[rng.randbelow(len(_SCORES))]
        return DerivationNode(0, label, score, start, cursor, kids, None)

    root = gen(0, 0)
    for node_id, node in enumerate(root.preorder(), start=1):
        node.node_id = node_id
    return root


def random_dag_tdl(seed: int, n_nodes: int) -> tuple[str, dict[str, set[str]]]:
    """TDL text for a random DAG plus its parent map (edges point upward)."""
    rng = SplitMix64(seed)
    parents: dict[str, set[str]] = {"t0": set()}
    lines = []
    for i in range(1, n_nodes):
        name = f"t{i}"
        choices = set()
        for _ in range(1 + rng.randbelow(2)):
            choices.add(f"t{rng.randbelow(i)}")
        parents[name] = choices
        lines.append(f"{name} := {' & '.join(sorted(choices))}.")
    return "\n".join(lines) + "\n", parents


def transitive_closure(parents: dict[str, set[str]]) -> dict[str, set[str]]:
    """Brute-force reachability (Floyd-Warshall style) as a subsumption oracle."""
    names = sorted(parents)
    reach = {a: {a} | parents[a] for a in names}
    changed = True
    while changed:
        changed = False
        for a in names:
            extra = set()
            for b in reach[a]:
                extra |= reach.get(b, {b})
            if not extra <= reach[a]:
                reach[a] |= extra
                changed = True
    return reach


def scan_labels(path: Path) -> list[str]:
    """Line-scan oracle: node labels read straight off the raw export text,
    independently of the tree parser."""
    labels = []
    pattern = re.compile(r'\(\s*\d+\s+([^\s()"]+)')
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        labels.extend(pattern.findall(line))
    return labels


def lexicon_identifiers(path: Path) -> set[str]:
    """Entry names scraped from a lexicon file with a line-anchored regex."""
    found = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        match = re.match(r"^([^\s:;]+)\s*:=", line)
        if match:
            found.add(match.group(1))
    return found


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def mini_hierarchy():
    return parse_tdl(
        [str(DATA_DIR / "grammar" / "types.tdl"), str(DATA_DIR / "grammar" / "lexicon.tdl")],
        lexicon=[str(DATA_DIR / "grammar" / "lexicon.tdl")],
    )
