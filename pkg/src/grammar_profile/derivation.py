"""Parse derivation-tree exports and enumerate countable grammar entities.

A derivation string is one parenthesized tree per sentence,

    (id label [score] start end  daughter ... | ("surface" ...))

where ``id`` is a non-negative integer, ``label`` names the grammar rule,
lexical type, or lexical entry applied at that node, ``score`` is an
optional parser score (0.0 when absent), and ``start``/``end`` are token
indices.  A node carries either daughter nodes or one quoted surface
string; anything following the surface inside its group (token feature
structures in some exports) is skipped.  See FORMATS.md for the grammar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import (
    DuplicateItemId,
    EmptyInput,
    FormatError,
    MalformedNode,
    UnbalancedParens,
)

CORPUS_FORMATS = ("udf-lines", "jsonl")


@dataclass
class DerivationNode:
    """One node of a derivation tree.

    ``node_id`` and ``score`` are parser bookkeeping and do not take part
    in equality; two trees are equal when labels, spans, daughter
    structure, and surfaces agree.
    """

    node_id: int = field(compare=False)
    label: str
    score: float = field(default=0.0, compare=False)
    span_start: int = 0
    span_end: int = 0
    daughters: list["DerivationNode"] = field(default_factory=list)
    surface: Optional[str] = None

    def is_terminal(self) -> bool:
        return self.surface is not None

    def preorder(self) -> Iterator["DerivationNode"]:
        yield self
        for daughter in self.daughters:
            yield from daughter.preorder()

    def terminals(self) -> list["DerivationNode"]:
        return [n for n in self.preorder() if n.is_terminal()]


@dataclass
class SentenceRecord:
    """One parsed sentence with its provenance metadata."""

    corpus_id: str
    item_id: str
    author: Optional[str]
    derivation: DerivationNode

    @property
    def key(self) -> tuple[str, str]:
        return (self.corpus_id, self.item_id)


# --- parsing ----------------------------------------------------------------

_ATOM_END = set(' \t\r\n()"')


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str, what: str) -> None:
        if self.peek() != ch:
            raise UnbalancedParens(what, self.pos)
        self.pos += 1

    def atom(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _ATOM_END:
            self.pos += 1
        return self.text[start:self.pos]

    def quoted(self) -> str:
        # caller guarantees text[pos] == '"'
        start = self.pos
        self.pos += 1
        out = []
        while True:
            if self.eof():
                raise UnbalancedParens("unterminated string", start)
            ch = self.text[self.pos]
            if ch == "\\":
                if self.pos + 1 >= len(self.text):
                    raise UnbalancedParens("unterminated string", start)
                out.append(self.text[self.pos + 1])
                self.pos += 2
            elif ch == '"':
                self.pos += 1
                return "".join(out)
            else:
                out.append(ch)
                self.pos += 1

    def skip_group_remainder(self) -> None:
        """Consume up to and including the ')' closing the current group,
        honouring nested groups and quoted strings."""
        depth = 0
        while True:
            if self.eof():
                raise UnbalancedParens("unbalanced parenthesis", self.pos)
            ch = self.text[self.pos]
            if ch == '"':
                self.quoted()
            elif ch == "(":
                depth += 1
                self.pos += 1
            elif ch == ")":
                self.pos += 1
                if depth == 0:
                    return
                depth -= 1
            else:
                self.pos += 1


def _parse_int(token: str, what: str, pos: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise MalformedNode(f"expected integer {what}, got {token!r}", pos) from None
    if value < 0:
        raise MalformedNode(f"{what} must be non-negative, got {value}", pos)
    return value


def _parse_node(sc: _Scanner) -> DerivationNode:
    sc.expect("(", "expected '('")
    head = sc.pos
    sc.skip_ws()

    id_token = sc.atom()
    if not id_token:
        raise MalformedNode("missing node id", sc.pos)
    node_id = _parse_int(id_token, "node id", head)

    sc.skip_ws()
    label = sc.atom()
    if not label:
        raise MalformedNode("missing node label", sc.pos)

    # Score is optional: two trailing numbers are (start, end), three are
    # (score, start, end).
    numbers = []
    while True:
        sc.skip_ws()
        if sc.peek() in ('(', '"', ')', ''):
            break
        numbers.append((sc.atom(), sc.pos))
    if len(numbers) == 2:
        score = 0.0
        (start_tok, start_pos), (end_tok, end_pos) = numbers
    elif len(numbers) == 3:
        (score_tok, score_pos), (start_tok, start_pos), (end_tok, end_pos) = numbers
        try:
            score = float(score_tok)
        except ValueError:
            raise MalformedNode(
                f"expected numeric score, got {score_tok!r}", score_pos
            ) from None
    else:
        raise MalformedNode(
            f"node {label!r} needs a token span (got {len(numbers)} numeric fields)",
            head,
        )
    span_start = _parse_int(start_tok, "span start", start_pos)
    span_end = _parse_int(end_tok, "span end", end_pos)
    if span_end < span_start:
        raise MalformedNode(
            f"span end {span_end} before span start {span_start}", head
        )

    daughters: list[DerivationNode] = []
    surface = None
    while True:
        sc.skip_ws()
        ch = sc.peek()
        if ch == ")":
            sc.pos += 1
            break
        if ch == "":
            raise UnbalancedParens("unbalanced parenthesis", sc.pos)
        if ch != "(":
            raise MalformedNode(f"unexpected {ch!r} in node body", sc.pos)
        # Peek into the group: a quoted string marks a terminal group.
        mark = sc.pos
        sc.pos += 1
        sc.skip_ws()
        if sc.peek() == '"':
            if surface is not None or daughters:
                raise MalformedNode("terminal group must be the only daughter", mark)
            surface = sc.quoted()
            sc.skip_group_remainder()
        else:
            sc.pos = mark
            daughters.append(_parse_node(sc))

    if surface is None and not daughters:
        raise MalformedNode(f"node {label!r} has neither daughters nor a surface", head)
    return DerivationNode(node_id, label, score, span_start, span_end, daughters, surface)


def _check_spans(node: DerivationNode) -> None:
    prev_end = node.span_start
    for daughter in node.daughters:
        if daughter.span_start < node.span_start or daughter.span_end > node.span_end:
            raise MalformedNode(
                f"daughter {daughter.label!r} span [{daughter.span_start},"
                f"{daughter.span_end}) escapes mother {node.label!r} span"
                f" [{node.span_start},{node.span_end})"
            )
        if daughter.span_start < prev_end:
            raise MalformedNode(
                f"daughter {daughter.label!r} overlaps its left sister"
            )
        prev_end = daughter.span_end
        _check_spans(daughter)


def parse_derivation(text: str) -> DerivationNode:
    """Parse one derivation string into its root node.

    Raises EmptyInput on blank input, UnbalancedParens (with the offending
    offset) on bracketing problems, and MalformedNode when a group is not a
    well-formed ``(id label [score] start end ...)`` node or the span
    invariants fail.
    """
    if text is None or not text.strip():
        raise EmptyInput("empty derivation string")
    sc = _Scanner(text)
    sc.skip_ws()
    if sc.peek() != "(":
        raise MalformedNode("derivation must start with '('", sc.pos)
    root = _parse_node(sc)
    sc.skip_ws()
    if not sc.eof():
        raise UnbalancedParens("trailing material after derivation", sc.pos)
    _check_spans(root)
    return root


def serialize_derivation(node: DerivationNode) -> str:
    """Render a tree in the canonical derivation format.

    ``parse_derivation(serialize_derivation(t))`` reconstructs a tree equal
    to ``t``, and serializing again yields identical bytes.
    """
    head = f"({node.node_id} {node.label} {float(node.score)!r} {node.span_start} {node.span_end}"
    if node.surface is not None:
        escaped = node.surface.replace("\\", "\\\\").replace('"', '\\"')
        return f'{head} ("{escaped}"))'
    body = " ".join(serialize_derivation(d) for d in node.daughters)
    return f"{head} {body})"


def extract_occurrences(node: DerivationNode) -> list[str]:
    """Labels of every countable entity in the tree, in pre-order.

    That is one label per internal node (phrasal constructions and lexical
    rules) and one per preterminal (lexical entries); surface strings are
    not entities and contribute nothing.
    """
    return [n.label for n in node.preorder()]


# --- corpus files -----------------------------------------------------------

def read_corpus(
    path: str,
    fmt: str = "udf-lines",
    corpus_id: Optional[str] = None,
    lenient: bool = False,
    skipped: Optional[list] = None,
) -> list[SentenceRecord]:
    """Read one corpus export file into sentence records.

    ``udf-lines`` holds one derivation per line with ``#`` comments;
    ``corpus_id`` is required and item ids are the 1-based line numbers.
    ``jsonl`` lines are objects with keys ``corpus``, ``item``, ``deriv``
    and optional ``author``.  In strict mode (default) the first bad line
    raises FormatError; with ``lenient=True`` bad lines are skipped, and
    ``skipped`` (if given) collects ``(line_no, message)`` tuples.
    """
    if fmt not in CORPUS_FORMATS:
        raise ValueError(f"unknown corpus format {fmt!r}; expected one of {CORPUS_FORMATS}")
    if fmt == "udf-lines" and not corpus_id:
        raise ValueError("corpus_id is required for udf-lines input")

    records: list[SentenceRecord] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or (fmt == "udf-lines" and line.startswith("#")):
                continue
            try:
                record = _parse_line(line, line_no, fmt, corpus_id)
                if record.key in seen:
                    raise DuplicateItemId(
                        f"duplicate item {record.key!r}", line_no
                    )
            except FormatError as err:
                if not lenient:
                    raise
                if skipped is not None:
                    skipped.append((line_no, str(err)))
                continue
            seen.add(record.key)
            records.append(record)
    return records


def _parse_line(line: str, line_no: int, fmt: str, corpus_id: Optional[str]) -> SentenceRecord:
    if fmt == "udf-lines":
        try:
            tree = parse_derivation(line)
        except (EmptyInput, UnbalancedParens, MalformedNode) as err:
            raise FormatError(str(err), line_no) from err
        return SentenceRecord(corpus_id, str(line_no), None, tree)

    try:
        obj = json.loads(line)
    except json.JSONDecodeError as err:
        raise FormatError(f"invalid JSON: {err.msg}", line_no) from err
    if not isinstance(obj, dict):
        raise FormatError("expected a JSON object", line_no)
    cid = obj.get("corpus", corpus_id)
    if not cid:
        raise FormatError("missing 'corpus' field and no default corpus id", line_no)
    item = obj.get("item")
    if item is None:
        raise FormatError("missing 'item' field", line_no)
    deriv = obj.get("deriv")
    if not isinstance(deriv, str):
        raise FormatError("missing or non-string 'deriv' field", line_no)
    author = obj.get("author")
    if author is not None and not isinstance(author, str):
        raise FormatError("'author' must be a string", line_no)
    try:
        tree = parse_derivation(deriv)
    except (EmptyInput, UnbalancedParens, MalformedNode) as err:
        raise FormatError(str(err), line_no) from err
    return SentenceRecord(str(cid), str(item), author, tree)
