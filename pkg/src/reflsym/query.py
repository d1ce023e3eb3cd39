"""Conjunctive query language over interpretation models.

Queries look like logic-programming goals: `symmetrical_objects(SO),
divergence(SO, D).`  Capitalized identifiers are variables, `_` matches
anything without binding, and conjuncts share variables through joins.
The language is deliberately small: conjunctions of built-in predicates
only, no rules, negation, or arithmetic.

Evaluation enumerates ground facts derived from a built model, joining
left to right, so results follow model storage order and are reproducible
run to run.  Solutions stream lazily from solve(); evaluate() materializes
them with a hard cap and a truncation flag.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Iterator

from . import model as model_ops
from .model import InterpretationModel

MAX_SOLUTIONS = 10_000

_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_NUMBER_RE = re.compile(r"-?\d+(\.\d+)?([eE][+-]?\d+)?")


class QueryError(Exception):
    pass


class QuerySyntaxError(QueryError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnknownPredicateError(QueryError):
    def __init__(self, name: str, arity: int):
        super().__init__(f"unknown predicate {name}/{arity}")
        self.name = name
        self.arity = arity


class ArityError(QueryError):
    def __init__(self, name: str, arity: int, expected: tuple[int, ...]):
        expect = " or ".join(str(a) for a in expected)
        super().__init__(f"{name} takes {expect} arguments, got {arity}")
        self.name = name
        self.arity = arity


# ---------------------------------------------------------------------------
# terms and AST


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    value: Any


@dataclass(frozen=True)
class Wildcard:
    pass


Term = Variable | Constant | Wildcard


@dataclass(frozen=True)
class Conjunct:
    predicate: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class QueryAst:
    conjuncts: tuple[Conjunct, ...]


def format_term(t: Term) -> str:
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Wildcard):
        return "_"
    v = t.value
    if isinstance(v, str):
        if _ATOM_RE.match(v):
            return v
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return repr(v)


def format_query(q: QueryAst) -> str:
    """Render an AST back to query text; parsing the result reproduces the AST."""
    conjuncts = ", ".join(
        f"{c.predicate}({', '.join(format_term(t) for t in c.args)})" for c in q.conjuncts
    )
    return conjuncts + "."


# ---------------------------------------------------------------------------
# parser


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str):
        raise QuerySyntaxError(message, self.line, self.col)

    def _advance(self, n: int):
        for ch in self.text[self.pos:self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self._advance(1)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def next_token(self) -> tuple[str, Any, int, int]:
        """Returns (kind, value, line, col); kind 'eof' at end of input."""
        self.skip_ws()
        line, col = self.line, self.col
        ch = self.peek()
        if ch == "":
            return "eof", None, line, col
        if ch in "(),.":
            self._advance(1)
            return ch, ch, line, col
        if ch == '"':
            return self._string_token(line, col)
        m = _NUMBER_RE.match(self.text, self.pos)
        if m and (ch.isdigit() or ch == "-"):
            self._advance(m.end() - self.pos)
            text = m.group(0)
            value = float(text) if any(c in text for c in ".eE") else int(text)
            return "number", value, line, col
        if ch.isalpha() or ch == "_":
            end = self.pos
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                end += 1
            word = self.text[self.pos:end]
            self._advance(end - self.pos)
            if word == "_":
                return "wildcard", None, line, col
            if word[0] == "_":
                raise QuerySyntaxError(f"bad identifier {word!r}", line, col)
            if word[0].isupper():
                return "variable", word, line, col
            return "name", word, line, col
        self.error(f"unexpected character {ch!r}")

    def _string_token(self, line: int, col: int):
        # Simple escapes only: \" and \\.
        out = []
        self._advance(1)
        while True:
            ch = self.peek()
            if ch == "":
                raise QuerySyntaxError("unterminated string", line, col)
            if ch == "\\":
                self._advance(1)
                esc = self.peek()
                if esc not in ('"', "\\"):
                    raise QuerySyntaxError(f"bad escape {esc!r}", self.line, self.col)
                out.append(esc)
                self._advance(1)
                continue
            if ch == '"':
                self._advance(1)
                return "string", "".join(out), line, col
            out.append(ch)
            self._advance(1)


class _Parser:
    def __init__(self, text: str):
        self.scanner = _Scanner(text)
        self.token = self.scanner.next_token()

    def _expect(self, kind: str, what: str):
        if self.token[0] != kind:
            raise QuerySyntaxError(
                f"expected {what}, found {self._describe()}", self.token[2], self.token[3]
            )
        value = self.token[1]
        self.token = self.scanner.next_token()
        return value

    def _describe(self) -> str:
        kind, value = self.token[0], self.token[1]
        if kind == "eof":
            return "end of input"
        return repr(value if isinstance(value, str) else str(value))

    def parse(self) -> QueryAst:
        conjuncts = [self._conjunct()]
        while self.token[0] == ",":
            self._expect(",", "','")
            conjuncts.append(self._conjunct())
        if self.token[0] == ".":
            self._expect(".", "'.'")
        if self.token[0] != "eof":
            raise QuerySyntaxError(
                f"unexpected {self._describe()} after query", self.token[2], self.token[3]
            )
        return QueryAst(conjuncts=tuple(conjuncts))

    def _conjunct(self) -> Conjunct:
        name = self._expect("name", "a predicate name")
        self._expect("(", "'('")
        args = [self._term()]
        while self.token[0] == ",":
            self._expect(",", "','")
            args.append(self._term())
        self._expect(")", "')'")
        return Conjunct(predicate=name, args=tuple(args))

    def _term(self) -> Term:
        kind, value, line, col = self.token
        if kind == "variable":
            self.token = self.scanner.next_token()
            return Variable(value)
        if kind == "wildcard":
            self.token = self.scanner.next_token()
            return Wildcard()
        if kind in ("number", "string"):
            self.token = self.scanner.next_token()
            return Constant(value)
        if kind == "name":
            self.token = self.scanner.next_token()
            return Constant(value)
        raise QuerySyntaxError(f"expected a term, found {self._describe()}", line, col)


# Built-in predicate signatures, used for parse-time arity checking.
SIGNATURES: frozenset[tuple[str, int]] = frozenset(
    {
        ("symmetrical_element", 1),
        ("non_symmetrical_element", 1),
        ("symmetrical_objects", 1),
        ("non_symmetrical_objects", 1),
        ("symmetrical_body_pose", 2),
        ("non_symmetrical_body_pose", 2),
        ("symmetry_stats", 4),
        ("symmetrical_objects_stats", 4),
        ("divergence", 2),
        ("perceptual_similarity", 2),
        ("perceptual_similarity", 3),
        ("semantic_similarity", 2),
        ("semantic_similarity", 3),
    }
)


def parse_query(text: str, signatures: frozenset[tuple[str, int]] = SIGNATURES) -> QueryAst:
    """Parse query text and check every conjunct against known predicates."""
    ast = _Parser(text).parse()
    names = {name for name, _ in signatures}
    for c in ast.conjuncts:
        if (c.predicate, len(c.args)) not in signatures:
            if c.predicate in names:
                expected = tuple(sorted(a for n, a in signatures if n == c.predicate))
                raise ArityError(c.predicate, len(c.args), expected)
            raise UnknownPredicateError(c.predicate, len(c.args))
    return ast


# ---------------------------------------------------------------------------
# evaluation

Binding = dict[str, Any]
FactSource = Callable[[], list[tuple]]


class PredicateTable:
    """Name/arity-keyed registry of fact sources; first registration wins."""

    def __init__(self):
        self._table: dict[tuple[str, int], FactSource] = {}
        self._cache: dict[tuple[str, int], list[tuple]] = {}

    def register(self, name: str, arity: int, source: FactSource) -> bool:
        key = (name, arity)
        if key in self._table:
            return False
        self._table[key] = source
        return True

    def lookup(self, name: str, arity: int) -> FactSource | None:
        return self._table.get((name, arity))

    def signatures(self) -> frozenset[tuple[str, int]]:
        return frozenset(self._table)

    def facts(self, name: str, arity: int) -> list[tuple]:
        key = (name, arity)
        if key not in self._cache:
            source = self._table.get(key)
            self._cache[key] = source() if source else []
        return self._cache[key]


def _stats_facts(stats: model_ops.SymmetryStats) -> list[tuple]:
    md = stats.mean_divergence if stats.mean_divergence is not None else 0.0
    ms = stats.mean_similarity if stats.mean_similarity is not None else 0.0
    return [(stats.num_elements, stats.num_symmetric, md, ms)]


def register_predicates(m: InterpretationModel) -> PredicateTable:
    """Bind every built-in predicate to fact enumeration over one model."""
    t = PredicateTable()
    t.register("symmetrical_element", 1, lambda: [(g,) for g in model_ops.symmetrical_elements(m)])
    t.register("non_symmetrical_element", 1,
               lambda: [(g,) for g in model_ops.non_symmetrical_elements(m)])
    t.register("symmetrical_objects", 1, lambda: [(g,) for g in model_ops.symmetrical_objects(m)])
    t.register("non_symmetrical_objects", 1,
               lambda: [(g,) for g in model_ops.non_symmetrical_objects(m)])
    t.register("symmetrical_body_pose", 2, lambda: list(model_ops.symmetrical_body_pose(m)))
    t.register("non_symmetrical_body_pose", 2, lambda: list(model_ops.non_symmetrical_body_pose(m)))
    t.register("symmetry_stats", 4, lambda: _stats_facts(model_ops.symmetry_stats(m)))
    t.register("symmetrical_objects_stats", 4,
               lambda: _stats_facts(model_ops.symmetrical_objects_stats(m)))
    t.register("divergence", 2, lambda: (
        [((p.left_id, p.right_id), p.divergence.mean) for p in m.pairs]
        + [((s.element_id,), s.divergence.mean) for s in m.singles]
    ))
    t.register("perceptual_similarity", 2, lambda: [
        ((p.left_id, p.right_id), p.perceptual_similarity)
        for p in m.pairs if p.perceptual_similarity is not None
    ])
    t.register("perceptual_similarity", 3, lambda: [
        (p.left_id, p.right_id, p.perceptual_similarity)
        for p in m.pairs if p.perceptual_similarity is not None
    ])
    t.register("semantic_similarity", 2, lambda: [
        ((p.left_id, p.right_id), p.semantic_similarity)
        for p in m.pairs if p.semantic_similarity is not None
    ])
    t.register("semantic_similarity", 3, lambda: [
        (p.left_id, p.right_id, p.semantic_similarity)
        for p in m.pairs if p.semantic_similarity is not None
    ])
    return t


def _constant_matches(expected: Any, value: Any) -> bool:
    if value == expected:
        return True
    # Let `divergence(c1, D)` reach a centered single stored as a group of one.
    return isinstance(value, tuple) and len(value) == 1 and value[0] == expected


def _match(args: tuple[Term, ...], fact: tuple, binding: Binding) -> Binding | None:
    if len(args) != len(fact):
        return None
    out = dict(binding)
    for term, value in zip(args, fact):
        if isinstance(term, Wildcard):
            continue
        if isinstance(term, Variable):
            if term.name in out:
                if out[term.name] != value:
                    return None
            else:
                out[term.name] = value
        elif not _constant_matches(term.value, value):
            return None
    return out


def solve(
    q: QueryAst, m: InterpretationModel, table: PredicateTable | None = None
) -> Iterator[Binding]:
    """Lazily generate all solutions by left-to-right conjunct joining."""
    table = table if table is not None else register_predicates(m)

    def rec(i: int, binding: Binding) -> Iterator[Binding]:
        if i == len(q.conjuncts):
            yield binding
            return
        c = q.conjuncts[i]
        for fact in table.facts(c.predicate, len(c.args)):
            extended = _match(c.args, fact, binding)
            if extended is not None:
                yield from rec(i + 1, extended)

    yield from rec(0, {})


@dataclass(frozen=True)
class QueryResult:
    solutions: tuple[Binding, ...]
    truncated: bool


def evaluate(
    q: QueryAst,
    m: InterpretationModel,
    max_solutions: int = MAX_SOLUTIONS,
    table: PredicateTable | None = None,
) -> QueryResult:
    """Materialize solutions, stopping with a truncation flag at the cap."""
    out: list[Binding] = []
    truncated = False
    for binding in solve(q, m, table):
        if len(out) >= max_solutions:
            truncated = True
            break
        out.append(binding)
    return QueryResult(solutions=tuple(out), truncated=truncated)


# ---------------------------------------------------------------------------
# answer formatting


def format_value(v: Any) -> str:
    """Answer-style rendering: 4-decimal numbers, bracketed lists."""
    if isinstance(v, tuple) or isinstance(v, list):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def format_solution(binding: Binding) -> str:
    if not binding:
        return "true"
    return ", ".join(f"{name} = {format_value(value)}" for name, value in binding.items())
