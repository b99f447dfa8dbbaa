"""Grammar type hierarchy: TDL loading, classification, subsumption.

Only the skeleton of a TDL file is interpreted: identifiers, their
supertype conjunctions, and statement boundaries.  Attribute-value
bodies, affixation patterns, docstrings, and directives are skipped with
balanced scanning.  That is all the downstream analyses need; full
unification semantics are out of scope.
"""

from __future__ import annotations

import hashlib
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import CycleDetected, UnknownIdentifier, UnterminatedDefinition

log = logging.getLogger(__name__)


class Category(str, Enum):
    """Buckets every derivation label is counted under."""

    SYNTACTIC_CONSTRUCTION = "construction"
    LEXICAL_RULE = "lexical_rule"
    LEXICAL_TYPE = "lexical_type"
    LEXICAL_ENTRY = "lexical_entry"
    UNKNOWN = "unknown"
    # pseudo-category for profiles spanning every bucket; never a
    # classification result
    ALL = "all"


ANALYSIS_CATEGORIES = (
    Category.SYNTACTIC_CONSTRUCTION,
    Category.LEXICAL_RULE,
    Category.LEXICAL_TYPE,
    Category.LEXICAL_ENTRY,
)

_RULE_SUFFIXES = ("_dlr", "_olr", "_ilr")
# lexical entries follow a word_pos# convention, e.g. law_n2, a_per_p,
# be_nv_is_cx_3; the final underscore segment is a short tag with an
# optional counter
_ENTRY_SHAPE = re.compile(r".+_(?:[a-z]+[0-9]*|[0-9]+)$")


def suffix_category(label: str) -> Optional[Category]:
    """Category determined by naming convention alone, if any."""
    if label.endswith("_c"):
        return Category.SYNTACTIC_CONSTRUCTION
    if label.endswith(_RULE_SUFFIXES):
        return Category.LEXICAL_RULE
    if label.endswith("_le"):
        return Category.LEXICAL_TYPE
    return None


@dataclass
class TypeHierarchy:
    """Immutable DAG of grammar type identifiers.

    ``parents`` maps an identifier to its direct supertypes; ``category``
    is total over ``nodes``.  ``dangling`` lists supertypes that were
    referenced but never defined (kept as parentless nodes).
    """

    nodes: set[str] = field(default_factory=set)
    parents: dict[str, set[str]] = field(default_factory=dict)
    category: dict[str, Category] = field(default_factory=dict)
    lexicon_ids: set[str] = field(default_factory=set)
    dangling: set[str] = field(default_factory=set)
    source_checksum: str = ""

    def __contains__(self, label: str) -> bool:
        return label in self.nodes

    def children_of(self, label: str) -> set[str]:
        # cached on first use; the hierarchy is immutable after load
        if not hasattr(self, "_children"):
            children: dict[str, set[str]] = {n: set() for n in self.nodes}
            for node, sups in self.parents.items():
                for sup in sups:
                    children.setdefault(sup, set()).add(node)
            self._children = children
        return self._children.get(label, set())

    def is_leaf(self, label: str) -> bool:
        return not self.children_of(label)

    def ancestors(self, label: str) -> set[str]:
        """All proper ancestors reachable via supertype edges."""
        seen: set[str] = set()
        queue = deque(self.parents.get(label, ()))
        while queue:
            current = queue.popleft()
            if current in seen:
                continue
            seen.add(current)
            queue.extend(self.parents.get(current, ()))
        return seen


@dataclass
class CategoryTally:
    """Distinct-identifier counts per category."""

    counts: dict[Category, int] = field(default_factory=dict)

    def __getitem__(self, category: Category) -> int:
        return self.counts.get(category, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


# --- TDL scanning -----------------------------------------------------------

_IDENT_STOP = set(' \t\r\n!"#$%&\'(),./:;<=>[]^|')
_DEF_OPS = (":=", ":+", ":<")
_BRACKET_MATES = {"[": "]", "<": ">", "(": ")"}


class _TdlScanner:
    """Splits a TDL file into (identifier, supertypes, line) definitions."""

    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.pos = 0
        self.line = 1

    def _advance(self, n: int = 1) -> None:
        chunk = self.text[self.pos:self.pos + n]
        self.line += chunk.count("\n")
        self.pos += n

    def _skip_line_comment(self) -> None:
        end = self.text.find("\n", self.pos)
        self._advance((len(self.text) if end < 0 else end) - self.pos)

    def _skip_block_comment(self) -> None:
        end = self.text.find("|#", self.pos + 2)
        if end < 0:
            self._advance(len(self.text) - self.pos)
        else:
            self._advance(end + 2 - self.pos)

    def _skip_string(self) -> None:
        if self.text.startswith('"""', self.pos):
            end = self.text.find('"""', self.pos + 3)
            self._advance((len(self.text) if end < 0 else end + 3) - self.pos)
            return
        self._advance()
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\":
                self._advance(2)
            elif ch == '"':
                self._advance()
                return
            else:
                self._advance()

    def _skip_balanced(self, opener: str) -> None:
        stack = [opener]
        self._advance()
        while stack and self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == '"':
                self._skip_string()
            elif ch == ";":
                self._skip_line_comment()
            elif self.text.startswith("#|", self.pos):
                self._skip_block_comment()
            elif ch in _BRACKET_MATES:
                stack.append(ch)
                self._advance()
            elif ch in (")", "]", ">"):
                if stack and _BRACKET_MATES[stack[-1]] == ch:
                    stack.pop()
                self._advance()
            else:
                self._advance()

    def _read_identifier(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _IDENT_STOP:
            self.pos += 1
        return self.text[start:self.pos]

    def definitions(self) -> Iterable[tuple[str, set[str], int]]:
        pending: Optional[str] = None
        current: Optional[tuple[str, set[str], int]] = None
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance()
            elif ch == ";":
                self._skip_line_comment()
            elif text.startswith("#|", self.pos):
                self._skip_block_comment()
            elif ch == "#":  # coreference tag
                self._advance()
                self._read_identifier()
            elif ch == '"':
                self._skip_string()
            elif ch in _BRACKET_MATES:
                self._skip_balanced(ch)
            elif ch == "%":  # affixation pattern or letter-set declaration
                self._advance()
                self._read_identifier()
                while self.pos < len(text) and text[self.pos] in " \t":
                    self._advance()
                if self.pos < len(text) and text[self.pos] == "(":
                    self._skip_balanced("(")
            elif ch == ".":
                self._advance()
                if current is not None:
                    yield current
                    current = None
                pending = None
            elif ch == "&" or ch == ",":
                self._advance()
            elif ch == ":":
                op = text[self.pos:self.pos + 2]
                if op in _DEF_OPS and pending is not None:
                    current = (pending, set(), self.line)
                    pending = None
                    self._advance(2)
                else:
                    # directive such as :begin / :end, or stray operator
                    self._advance()
                    self._read_identifier()
                    pending = None
            else:
                ident = self._read_identifier()
                if not ident:
                    self._advance()
                    continue
                if current is not None:
                    current[1].add(ident)
                else:
                    pending = ident
        if current is not None:
            raise UnterminatedDefinition(self.path, current[2], current[0])


def _expand_paths(files: Sequence[str] | str) -> list[Path]:
    if isinstance(files, (str, Path)):
        files = [files]
    paths: list[Path] = []
    for entry in files:
        p = Path(entry)
        if p.is_dir():
            paths.extend(sorted(p.rglob("*.tdl")))
        else:
            paths.append(p)
    return paths


def grammar_checksum(files: Sequence[str] | str) -> str:
    """SHA-256 over the grammar files, used to invalidate profile caches."""
    digest = hashlib.sha256()
    for path in _expand_paths(files):
        digest.update(path.name.encode("utf-8"))
        digest.update(path.read_bytes())
    return digest.hexdigest()


def parse_tdl(
    files: Sequence[str] | str,
    lexicon: Sequence[str] = (),
) -> TypeHierarchy:
    """Load type definitions from ``.tdl`` files (or directories of them).

    ``lexicon`` names the files whose definitions are lexical entries
    rather than grammar-internal types; matching is by resolved path or
    basename.  Multiple definition clauses for one identifier merge their
    supertype sets.  Supertypes that are never defined are kept as
    parentless nodes and logged as warnings.  Raises CycleDetected when
    the supertype graph has a cycle.
    """
    paths = _expand_paths(files)
    lexicon_paths = {Path(p).resolve() for p in _expand_paths(lexicon)}
    lexicon_names = {Path(p).name for p in lexicon}

    digest = hashlib.sha256()
    defined: dict[str, set[str]] = {}
    lexicon_ids: set[str] = set()
    for path in paths:
        data = path.read_bytes()
        digest.update(path.name.encode("utf-8"))
        digest.update(data)
        is_lexicon = path.resolve() in lexicon_paths or path.name in lexicon_names
        scanner = _TdlScanner(data.decode("utf-8"), str(path))
        for ident, supertypes, _line in scanner.definitions():
            defined.setdefault(ident, set()).update(supertypes)
            if is_lexicon:
                lexicon_ids.add(ident)

    hierarchy = TypeHierarchy(source_checksum=digest.hexdigest())
    hierarchy.lexicon_ids = lexicon_ids
    hierarchy.nodes = set(defined)
    hierarchy.parents = {ident: set(sups) for ident, sups in defined.items()}
    for ident, sups in defined.items():
        for sup in sups:
            if sup not in defined:
                hierarchy.dangling.add(sup)
    for sup in sorted(hierarchy.dangling):
        log.warning("supertype %r referenced but never defined", sup)
        hierarchy.nodes.add(sup)
        hierarchy.parents.setdefault(sup, set())

    _check_acyclic(hierarchy)
    hierarchy.category = {node: _derive_category(hierarchy, node)
                          for node in hierarchy.nodes}
    return hierarchy


def _check_acyclic(h: TypeHierarchy) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {node: WHITE for node in h.nodes}
    for start in sorted(h.nodes):
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, Iterable[str]]] = [(start, iter(sorted(h.parents[start])))]
        color[start] = GREY
        trail = [start]
        while stack:
            node, sups = stack[-1]
            advanced = False
            for sup in sups:
                if color[sup] == GREY:
                    cycle = trail[trail.index(sup):] + [sup]
                    raise CycleDetected(cycle)
                if color[sup] == WHITE:
                    color[sup] = GREY
                    trail.append(sup)
                    stack.append((sup, iter(sorted(h.parents[sup]))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                trail.pop()
                stack.pop()


def _derive_category(h: TypeHierarchy, label: str) -> Category:
    direct = suffix_category(label)
    if direct is not None:
        return direct
    if label in h.lexicon_ids:
        return Category.LEXICAL_ENTRY
    parents = h.parents.get(label, set())
    if h.is_leaf(label) and any(suffix_category(p) == Category.LEXICAL_TYPE
                                for p in parents):
        return Category.LEXICAL_ENTRY
    # nearest ancestor with a decisive suffix, breadth-first, ties broken
    # alphabetically so the result is load-order independent
    seen: set[str] = set()
    frontier = sorted(parents)
    while frontier:
        nxt: list[str] = []
        for anc in frontier:
            if anc in seen:
                continue
            seen.add(anc)
            cat = suffix_category(anc)
            if cat is not None:
                return cat
            nxt.extend(sorted(h.parents.get(anc, ())))
        frontier = nxt
    return Category.UNKNOWN


def classify(label: str, hierarchy: Optional[TypeHierarchy] = None) -> Category:
    """Assign a derivation label to its category.

    Naming-convention suffixes decide first (``_c`` constructions,
    ``_dlr``/``_olr``/``_ilr`` lexical rules, ``_le`` lexical types); after
    that the hierarchy decides for known identifiers, and the lexical-entry
    name shape backstops labels the hierarchy has never seen.
    """
    direct = suffix_category(label)
    if direct is not None:
        return direct
    if hierarchy is not None and label in hierarchy.nodes:
        return hierarchy.category[label]
    if _ENTRY_SHAPE.match(label):
        return Category.LEXICAL_ENTRY
    return Category.UNKNOWN


def subsumes(ancestor: str, descendant: str, hierarchy: TypeHierarchy) -> bool:
    """True iff ``ancestor`` is reachable from ``descendant`` (reflexively)."""
    for label in (ancestor, descendant):
        if label not in hierarchy.nodes:
            raise UnknownIdentifier(f"{label!r} is not in the hierarchy")
    if ancestor == descendant:
        return True
    return ancestor in hierarchy.ancestors(descendant)


def tally_categories(labels: Iterable[str], hierarchy: Optional[TypeHierarchy] = None) -> CategoryTally:
    """Count distinct identifiers per category among the observed labels."""
    counts: dict[Category, int] = {}
    for label in set(labels):
        cat = classify(label, hierarchy)
        counts[cat] = counts.get(cat, 0) + 1
    return CategoryTally(counts)


def classification_audit(hierarchy: TypeHierarchy) -> list[tuple[str, Category, Category]]:
    """Hierarchy nodes whose suffix category disagrees with the category the
    ancestor-based fallback would assign.  Must be empty for ``_c`` and
    ``_le`` suffixes on a well-formed grammar."""
    disagreements = []
    for node in sorted(hierarchy.nodes):
        direct = suffix_category(node)
        if direct is None:
            continue
        seen: set[str] = set()
        frontier = sorted(hierarchy.parents.get(node, ()))
        fallback = None
        while frontier and fallback is None:
            nxt: list[str] = []
            for anc in frontier:
                if anc in seen:
                    continue
                seen.add(anc)
                cat = suffix_category(anc)
                if cat is not None:
                    fallback = cat
                    break
                nxt.extend(sorted(hierarchy.parents.get(anc, ())))
            frontier = nxt
        if fallback is not None and fallback != direct:
            disagreements.append((node, direct, fallback))
    return disagreements
