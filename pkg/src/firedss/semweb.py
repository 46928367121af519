"""RDF triples, tabular-to-graph conversion, and a SPARQL-subset engine.

The graph model is deliberately small: IRIs, typed literals (integer,
decimal, string, boolean), and set-semantics triples with a prefix map.
Queries cover the fragment `SELECT ... WHERE { patterns . FILTER (...) }`
with comparison filters joined by && and ||. Result rows are returned in
a canonical order so query output is stable across runs.
"""

from __future__ import annotations

import re
import statistics
import time
from dataclasses import dataclass

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDF_TYPE = RDF_NS + "type"

DATATYPE_IRIS = {
    "integer": XSD + "integer",
    "decimal": XSD + "decimal",
    "string": XSD + "string",
    "boolean": XSD + "boolean",
}
_IRI_TO_DATATYPE = {v: k for k, v in DATATYPE_IRIS.items()}


class GraphError(ValueError):
    pass


class NTriplesSyntaxError(GraphError):
    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class QuerySyntaxError(GraphError):
    def __init__(self, position, message):
        super().__init__(f"at {position}: {message}")
        self.position = position


class UnboundVariable(GraphError):
    pass


class UnknownPrefix(GraphError):
    pass


_IRI_OK = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:\S+$")


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        if not _IRI_OK.match(self.value):
            raise GraphError(f"not an absolute IRI: {self.value!r}")


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    datatype: str = "string"

    def __post_init__(self):
        if self.datatype not in DATATYPE_IRIS:
            raise GraphError(f"unsupported datatype: {self.datatype}")
        if self.datatype == "integer":
            try:
                int(self.lexical)
            except ValueError:
                raise GraphError(f"bad integer lexical form: {self.lexical!r}") from None
        elif self.datatype == "decimal":
            try:
                float(self.lexical)
            except ValueError:
                raise GraphError(f"bad decimal lexical form: {self.lexical!r}") from None
        elif self.datatype == "boolean" and self.lexical not in ("true", "false"):
            raise GraphError(f"bad boolean lexical form: {self.lexical!r}")

    def numeric_value(self):
        if self.datatype == "integer":
            return int(self.lexical)
        if self.datatype == "decimal":
            return float(self.lexical)
        return None


def literal_for(value) -> Literal:
    """Map a Python value onto the closest typed literal."""
    if isinstance(value, bool):
        return Literal("true" if value else "false", "boolean")
    if isinstance(value, int):
        return Literal(str(value), "integer")
    if isinstance(value, float):
        return Literal(repr(value), "decimal")
    return Literal(str(value), "string")


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Iri | Literal


class Graph:
    """Set of triples plus a prefix map. Treated as immutable once built."""

    def __init__(self, triples=(), prefixes=None):
        self.triples = set(triples)
        self.prefixes = dict(prefixes or {})

    def add(self, triple: Triple):
        self.triples.add(triple)

    def bind(self, prefix, iri):
        self.prefixes[prefix] = iri if isinstance(iri, str) else iri.value

    def __len__(self):
        return len(self.triples)

    def __contains__(self, triple):
        return triple in self.triples

    def __eq__(self, other):
        return isinstance(other, Graph) and self.triples == other.triples

    def terms(self):
        out = set()
        for t in self.triples:
            out.add(t.subject)
            out.add(t.predicate)
            out.add(t.object)
        return out


def csv_to_graph(dataset, base, row_prefix="row") -> Graph:
    """One triple per (row, column): subject <base><row_prefix><i>,
    predicate <base><column>, object typed from the cell value
    (int -> integer, float -> decimal, token -> string)."""
    base = base.value if isinstance(base, Iri) else base
    g = Graph()
    g.bind("ds", base)
    for i, row in enumerate(dataset.rows):
        subject = Iri(f"{base}{row_prefix}{i}")
        for col, value in zip(dataset.schema, row):
            g.add(Triple(subject, Iri(base + col.name), literal_for(value)))
    return g


# --- serialization -----------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def _escape(text):
    return "".join(_ESCAPES.get(c, c) for c in text)


def _term_nt(term):
    if isinstance(term, Iri):
        return f"<{term.value}>"
    return f'"{_escape(term.lexical)}"^^<{DATATYPE_IRIS[term.datatype]}>'


def serialize(g: Graph, format="ntriples") -> str:
    """Serialize a graph: canonical N-Triples (sorted lines) or RDF-XML."""
    if format == "ntriples":
        lines = sorted(
            f"{_term_nt(t.subject)} {_term_nt(t.predicate)} {_term_nt(t.object)} ."
            for t in g.triples)
        return "\n".join(lines) + ("\n" if lines else "")
    if format == "rdfxml":
        return _serialize_rdfxml(g)
    raise GraphError(f"unknown serialization format: {format}")


def _split_iri(iri: str):
    cut = max(iri.rfind("#"), iri.rfind("/"))
    if cut <= 0 or cut == len(iri) - 1:
        return None
    local = iri[cut + 1:]
    if not re.match(r"^[A-Za-z_][A-Za-z0-9_.-]*$", local):
        return None
    return iri[:cut + 1], local


def _xml_escape(text):
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _serialize_rdfxml(g: Graph) -> str:
    namespaces = {"rdf": RDF_NS}
    iri_to_prefix = {RDF_NS: "rdf"}
    for prefix, iri in sorted(g.prefixes.items()):
        if iri not in iri_to_prefix and prefix != "rdf":
            namespaces[prefix] = iri
            iri_to_prefix[iri] = prefix
    counter = 0

    def qname(iri):
        nonlocal counter
        parts = _split_iri(iri)
        if parts is None:
            raise GraphError(f"cannot write predicate {iri!r} as XML name")
        ns, local = parts
        if ns not in iri_to_prefix:
            counter += 1
            while f"ns{counter}" in namespaces:
                counter += 1
            namespaces[f"ns{counter}"] = ns
            iri_to_prefix[ns] = f"ns{counter}"
        return f"{iri_to_prefix[ns]}:{local}"

    by_subject = {}
    for t in sorted(g.triples, key=lambda t: (t.subject, t.predicate, _term_nt(t.object))):
        by_subject.setdefault(t.subject, []).append(t)

    body = []
    for subject in sorted(by_subject):
        body.append(f'  <rdf:Description rdf:about="{_xml_escape(subject.value)}">')
        for t in by_subject[subject]:
            name = qname(t.predicate.value)
            if isinstance(t.object, Iri):
                body.append(f'    <{name} rdf:resource="{_xml_escape(t.object.value)}"/>')
            else:
                dt = DATATYPE_IRIS[t.object.datatype]
                body.append(f'    <{name} rdf:datatype="{dt}">'
                            f"{_xml_escape(t.object.lexical)}</{name}>")
        body.append("  </rdf:Description>")

    attrs = "".join(f'\n    xmlns:{p}="{_xml_escape(iri)}"'
                    for p, iri in sorted(namespaces.items()))
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f"<rdf:RDF{attrs}>\n" + "\n".join(body) + "\n</rdf:RDF>\n")


_NT_LINE = re.compile(
    r'^<(?P<s>[^>]+)>\s+<(?P<p>[^>]+)>\s+'
    r'(?:<(?P<o_iri>[^>]+)>|"(?P<o_lex>(?:[^"\\]|\\.)*)"'
    r'(?:\^\^<(?P<o_dt>[^>]+)>)?)\s*\.\s*$')


def _unescape(text):
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\":
            if i + 1 >= len(text) or text[i + 1] not in _UNESCAPES:
                raise GraphError(f"bad escape in literal: {text!r}")
            out.append(_UNESCAPES[text[i + 1]])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def parse_ntriples(text: str) -> Graph:
    """Parse N-Triples as produced by serialize(); duplicate lines collapse."""
    g = Graph()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _NT_LINE.match(line)
        if m is None:
            reason = "missing terminal '.'" if not line.endswith(".") else "malformed triple"
            raise NTriplesSyntaxError(lineno, reason)
        try:
            subject = Iri(m.group("s"))
            predicate = Iri(m.group("p"))
            if m.group("o_iri") is not None:
                obj = Iri(m.group("o_iri"))
            else:
                lex = _unescape(m.group("o_lex"))
                dt_iri = m.group("o_dt")
                if dt_iri is None:
                    datatype = "string"
                else:
                    datatype = _IRI_TO_DATATYPE.get(dt_iri)
                    if datatype is None:
                        raise GraphError(f"unsupported datatype IRI {dt_iri!r}")
                obj = Literal(lex, datatype)
        except GraphError as exc:
            raise NTriplesSyntaxError(lineno, str(exc)) from None
        g.add(Triple(subject, predicate, obj))
    return g


# --- query AST and parser ----------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class TriplePattern:
    subject: object
    predicate: object
    object: object

    def variables(self):
        return {t.name for t in (self.subject, self.predicate, self.object)
                if isinstance(t, Var)}


@dataclass(frozen=True)
class Comparison:
    op: str                     # < <= > >= = !=
    left: object                # Var or Literal
    right: object


@dataclass(frozen=True)
class BoolExpr:
    op: str                     # "&&" or "||"
    left: object
    right: object


@dataclass(frozen=True)
class Query:
    prefixes: dict
    select: tuple | None        # None means SELECT *
    patterns: tuple
    filter: object              # Comparison | BoolExpr | None

    def pattern_variables(self):
        out = set()
        for p in self.patterns:
            out |= p.variables()
        return out


_Q_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<iri><[^<>\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<var>\?[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||!=|<=|>=|=|<|>)
  | (?P<pname>[A-Za-z_][A-Za-z0-9_-]*:[A-Za-z_][A-Za-z0-9_.-]*)
  | (?P<pname_ns>[A-Za-z_][A-Za-z0-9_-]*:)
  | (?P<keyword>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}().*,])
""", re.VERBOSE)


def _q_tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _Q_TOKEN.match(text, pos)
        if m is None:
            raise QuerySyntaxError(pos, f"unexpected character {text[pos]!r}")
        if m.lastgroup not in ("ws", "comment"):
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _QueryParser:
    def __init__(self, text):
        self.tokens = _q_tokenize(text)
        self.i = 0
        self.prefixes = {}

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, expected):
        kind, text, pos = self.peek()
        raise QuerySyntaxError(pos, f"expected {expected}, found {text or 'end of input'!r}")

    def keyword(self, word):
        kind, text, _ = self.peek()
        return kind == "keyword" and text.upper() == word

    def expect_keyword(self, word):
        if not self.keyword(word):
            self.error(word)
        return self.next()

    def expect_punct(self, char):
        kind, text, _ = self.peek()
        if kind != "punct" or text != char:
            self.error(repr(char))
        return self.next()

    def parse(self):
        while self.keyword("PREFIX"):
            self.next()
            kind, text, pos = self.next()
            if kind != "pname_ns":
                raise QuerySyntaxError(pos, "expected a prefix name ending in ':'")
            prefix = text[:-1]
            kind, iri_text, pos = self.next()
            if kind != "iri":
                raise QuerySyntaxError(pos, "expected <iri> after prefix name")
            self.prefixes[prefix] = iri_text[1:-1]

        self.expect_keyword("SELECT")
        select = None
        if self.peek()[0] == "punct" and self.peek()[1] == "*":
            self.next()
        else:
            names = []
            while self.peek()[0] == "var":
                names.append(self.next()[1][1:])
            if not names:
                self.error("variable list or *")
            select = tuple(names)

        self.expect_keyword("WHERE")
        self.expect_punct("{")
        patterns = []
        filter_expr = None
        while True:
            kind, text, pos = self.peek()
            if kind == "punct" and text == "}":
                self.next()
                break
            if kind == "keyword" and text.upper() == "FILTER":
                self.next()
                self.expect_punct("(")
                expr = self.parse_or()
                self.expect_punct(")")
                filter_expr = expr if filter_expr is None else \
                    BoolExpr("&&", filter_expr, expr)
                if self.peek()[0] == "punct" and self.peek()[1] == ".":
                    self.next()
                continue
            patterns.append(self.parse_pattern())
            if self.peek()[0] == "punct" and self.peek()[1] == ".":
                self.next()
        if self.peek()[0] != "eof":
            self.error("end of query")

        query = Query(dict(self.prefixes), select, tuple(patterns), filter_expr)
        bound = query.pattern_variables()
        for name in (query.select or ()):
            if name not in bound:
                raise UnboundVariable(f"projected variable ?{name} not in any pattern")
        if filter_expr is not None:
            for name in _filter_variables(filter_expr):
                if name not in bound:
                    raise UnboundVariable(f"filter variable ?{name} not in any pattern")
        return query

    def parse_pattern(self):
        s = self.parse_term(position="subject")
        p = self.parse_term(position="predicate")
        o = self.parse_term(position="object")
        return TriplePattern(s, p, o)

    def parse_term(self, position):
        kind, text, pos = self.peek()
        if kind == "var":
            self.next()
            return Var(text[1:])
        if kind == "iri":
            self.next()
            return Iri(text[1:-1])
        if kind == "pname":
            self.next()
            prefix, local = text.split(":", 1)
            if prefix not in self.prefixes:
                raise UnknownPrefix(prefix)
            return Iri(self.prefixes[prefix] + local)
        if kind == "keyword" and text == "a" and position == "predicate":
            self.next()
            return Iri(RDF_TYPE)
        if kind == "string":
            self.next()
            return Literal(_unescape(text[1:-1]), "string")
        if kind == "number":
            self.next()
            return Literal(text, "integer" if re.fullmatch(r"-?\d+", text) else "decimal")
        if kind == "keyword" and text in ("true", "false"):
            self.next()
            return Literal(text, "boolean")
        self.error(f"{position} term")

    def parse_or(self):
        left = self.parse_and()
        while self.peek()[0] == "op" and self.peek()[1] == "||":
            self.next()
            left = BoolExpr("||", left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_primary()
        while self.peek()[0] == "op" and self.peek()[1] == "&&":
            self.next()
            left = BoolExpr("&&", left, self.parse_primary())
        return left

    def parse_primary(self):
        if self.peek()[0] == "punct" and self.peek()[1] == "(":
            self.next()
            expr = self.parse_or()
            self.expect_punct(")")
            return expr
        left = self.parse_operand()
        kind, op, pos = self.peek()
        if kind != "op" or op in ("&&", "||"):
            self.error("comparison operator")
        self.next()
        right = self.parse_operand()
        return Comparison(op, left, right)

    def parse_operand(self):
        kind, text, pos = self.peek()
        if kind == "var":
            self.next()
            return Var(text[1:])
        if kind == "number":
            self.next()
            return Literal(text, "integer" if re.fullmatch(r"-?\d+", text) else "decimal")
        if kind == "string":
            self.next()
            return Literal(_unescape(text[1:-1]), "string")
        if kind == "keyword" and text in ("true", "false"):
            self.next()
            return Literal(text, "boolean")
        self.error("filter operand")


def _filter_variables(expr):
    if isinstance(expr, BoolExpr):
        return _filter_variables(expr.left) | _filter_variables(expr.right)
    out = set()
    for side in (expr.left, expr.right):
        if isinstance(side, Var):
            out.add(side.name)
    return out


def parse_query(text: str) -> Query:
    """Parse a SPARQL-subset query: PREFIX / SELECT / WHERE / FILTER."""
    return _QueryParser(text).parse()


# --- execution ---------------------------------------------------------------

class _RejectBinding(Exception):
    """Filter comparison over incompatible kinds: drop the binding."""


def _compare(op, a, b):
    if isinstance(a, Iri) or isinstance(b, Iri):
        raise _RejectBinding
    an, bn = a.numeric_value(), b.numeric_value()
    if an is not None and bn is not None:
        x, y = an, bn
    elif a.datatype == "string" and b.datatype == "string":
        x, y = a.lexical, b.lexical
    elif a.datatype == "boolean" and b.datatype == "boolean":
        if op in ("=", "!="):
            x, y = a.lexical, b.lexical
        else:
            raise _RejectBinding
    else:
        raise _RejectBinding
    return {
        "<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y,
        "=": x == y, "!=": x != y,
    }[op]


def _eval_filter(expr, binding, clashes):
    if isinstance(expr, BoolExpr):
        left = _eval_filter(expr.left, binding, clashes)
        right = _eval_filter(expr.right, binding, clashes)
        return (left and right) if expr.op == "&&" else (left or right)
    left = binding[expr.left.name] if isinstance(expr.left, Var) else expr.left
    right = binding[expr.right.name] if isinstance(expr.right, Var) else expr.right
    try:
        return _compare(expr.op, left, right)
    except _RejectBinding:
        clashes[0] += 1
        return False


@dataclass(frozen=True)
class ResultTable:
    columns: tuple
    rows: tuple
    type_clashes: int = 0

    def __len__(self):
        return len(self.rows)


def _match_pattern(pattern, triple, binding):
    out = dict(binding)
    for pat, val in ((pattern.subject, triple.subject),
                     (pattern.predicate, triple.predicate),
                     (pattern.object, triple.object)):
        if isinstance(pat, Var):
            bound = out.get(pat.name)
            if bound is None:
                out[pat.name] = val
            elif bound != val:
                return None
        elif pat != val:
            return None
    return out


def execute(q: Query, g: Graph) -> ResultTable:
    """Natural join of pattern matches, filter, project, deduplicate.

    A filter comparison over incompatible kinds (IRI vs number, string vs
    decimal) evaluates as false instead of aborting the query; each such
    clash is counted on the result, and a binding whose filter comes out
    false is rejected. Rows come back in canonical lexicographic order.
    """
    bindings = [{}]
    for pattern in q.patterns:
        nxt = []
        for b in bindings:
            for triple in g.triples:
                m = _match_pattern(pattern, triple, b)
                if m is not None:
                    nxt.append(m)
        bindings = nxt
        if not bindings:
            break

    clashes = [0]
    if q.filter is not None:
        bindings = [b for b in bindings if _eval_filter(q.filter, b, clashes)]

    if q.select is None:
        seen = []
        columns = tuple(n for p in q.patterns for n in _pattern_var_order(p, seen))
    else:
        columns = q.select

    rows = {tuple(b[name] for name in columns) for b in bindings}
    ordered = tuple(sorted(rows, key=lambda row: tuple(_term_nt(c) for c in row)))
    return ResultTable(columns, ordered, clashes[0])


def _pattern_var_order(pattern, seen):
    out = []
    for t in (pattern.subject, pattern.predicate, pattern.object):
        if isinstance(t, Var) and t.name not in seen:
            seen.append(t.name)
            out.append(t.name)
    return out


def format_cell(term) -> str:
    """Human-readable cell rendering for tables: IRIs bare, literals lexical."""
    if isinstance(term, Iri):
        return term.value
    return term.lexical


def time_queries(queries, g: Graph, repetitions=3):
    """Wall-clock timing per query text; each repetition's result must match
    a single reference execution, then is discarded."""
    if repetitions < 1:
        raise GraphError("repetitions must be >= 1")
    report = []
    for text in queries:
        query = parse_query(text)
        reference = execute(query, g)
        samples = []
        for _ in range(repetitions):
            start = time.perf_counter()
            result = execute(query, g)
            samples.append((time.perf_counter() - start) * 1000.0)
            if result.rows != reference.rows:
                raise GraphError("nondeterministic query execution detected")
        report.append({
            "query": text,
            "rows": len(reference),
            "min_ms": min(samples),
            "median_ms": statistics.median(samples),
        })
    return report
