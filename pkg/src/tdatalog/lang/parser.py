"""Reader for program (``.tdl``) and dataset (``.tdf``) files.

Program files hold one rule per statement::

    % comment
    Class(x,y) &luk Hypernym(y,z) -> Class(x,z).
    R(x,y) -> exists z . R(y,z).
    ~Q(x) &min S(x) -> R(x).

Inside rules every bare identifier in argument position is a variable;
constants are written as quoted strings.  Dataset files hold facts::

    0.8 :: NeuralLabel(img1, tiger_shark).
    Hypernym(tench, fish).

where bare identifiers (and quoted strings) are constants.
"""
from __future__ import annotations

import re
from typing import NamedTuple, Optional

from ..degrees import TNorm, UnaryOp
from ..errors import ConfigError, Diagnostic, ParseError, ValidationError
from .syntax import Atom, Literal, Program, Rule, Var

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\f\v]+"),
    ("NL", r"\n"),
    ("COMMENT", r"%[^\n]*"),
    ("ARROW", r"->"),
    ("DCOLON", r"::"),
    ("CONN", r"&[A-Za-z_][A-Za-z0-9_]*"),
    ("NUMBER", r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"),
    ("NULL", r"_:[^\s,()]+"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("STRING", r'"(?:\\.|[^"\\\n])*"'),
    ("PUNCT", r"[(),.\[\]!~@]"),
    ("ERROR", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "NL":
            line += 1
            line_start = m.end()
            continue
        if kind in ("WS", "COMMENT"):
            continue
        tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


class _Error(Exception):
    def __init__(self, token, message):
        self.token = token
        self.message = message


class _Reader:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.diags: list[Diagnostic] = []

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("PUNCT", "ARROW", "DCOLON") and t.text == text

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise _Error(t, f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def error(self, token, message):
        self.diags.append(Diagnostic(token.line, token.col, message))

    def recover(self):
        # skip to a statement-ending '.' that is the last token on its line
        while True:
            t = self.next()
            if t.kind == "EOF":
                return
            if t.kind == "PUNCT" and t.text == "." and self.peek().line != t.line:
                return

    def number(self) -> float:
        t = self.peek()
        if t.kind != "NUMBER":
            raise _Error(t, f"expected a number, found {t.text or 'end of input'!r}")
        self.next()
        return float(t.text)

    def atom(self, term) -> Atom:
        t = self.peek()
        if t.kind != "IDENT":
            raise _Error(t, f"expected a predicate name, found {t.text or 'end of input'!r}")
        self.next()
        args = []
        if self.at("("):
            self.next()
            if not self.at(")"):
                args.append(term(self))
                while self.at(","):
                    self.next()
                    args.append(term(self))
            self.expect(")")
        return Atom(t.text, tuple(args))


def _rule_term(r: _Reader):
    t = r.peek()
    if t.kind == "IDENT":
        r.next()
        return Var(t.text)
    if t.kind == "STRING":
        r.next()
        return _unquote(t.text)
    if t.kind == "NULL":
        raise _Error(t, "rules may not mention nulls")
    raise _Error(t, f"expected a variable or constant, found {t.text or 'end of input'!r}")


def _ground_term(r: _Reader):
    t = r.peek()
    if t.kind in ("IDENT", "NUMBER"):
        r.next()
        return t.text
    if t.kind == "STRING":
        r.next()
        return _unquote(t.text)
    if t.kind == "NULL":
        raise _Error(t, f"null symbol {t.text} is not allowed in data")
    raise _Error(t, f"expected a constant, found {t.text or 'end of input'!r}")


def _unary(r: _Reader) -> Optional[UnaryOp]:
    t = r.peek()
    try:
        if r.at("!"):
            r.next()
            return UnaryOp("neg")
        if r.at("~"):
            r.next()
            return UnaryOp("nneg")
        if t.kind == "IDENT" and t.text == "delta" and r.at("[", 1):
            r.next()
            r.next()
            p = r.number()
            r.expect("]")
            return UnaryOp("delta", p)
        if r.at("@"):
            r.next()
            name = r.next()
            if name.kind != "IDENT":
                raise _Error(name, "expected an operator name after '@'")
            p = None
            if r.at("["):
                r.next()
                p = r.number()
                r.expect("]")
            return UnaryOp(name.text, p)
    except ConfigError as exc:
        raise _Error(t, str(exc)) from None
    return None


def _connective(r: _Reader) -> TNorm:
    t = r.next()
    p = None
    if r.at("("):
        r.next()
        p = r.number()
        r.expect(")")
    try:
        return TNorm(t.text[1:], p)
    except ConfigError as exc:
        raise _Error(t, str(exc)) from None


class _ArityTable:
    def __init__(self, reader: _Reader):
        self.reader = reader
        self.arities: dict[str, int] = {}

    def check(self, atom: Atom, token: Token) -> bool:
        n = self.arities.setdefault(atom.predicate, atom.arity)
        if n != atom.arity:
            self.reader.error(
                token, f"arity mismatch: {atom.predicate} used with {atom.arity} "
                f"argument(s), previously {n}")
            return False
        return True


def _parse_rule(r: _Reader, rule_id: int, arities: _ArityTable) -> Optional[Rule]:
    start = r.peek()
    body = []
    atom_tokens = []
    conns = []
    while True:
        op = _unary(r)
        atom_tokens.append(r.peek())
        body.append(Literal(r.atom(_rule_term), op))
        if r.peek().kind == "CONN":
            conns.append((r.peek(), _connective(r)))
            continue
        break
    r.expect("->")
    existential = []
    if r.peek().kind == "IDENT" and r.peek().text == "exists" and not r.at("(", 1) \
            and r.peek(1).kind == "IDENT":
        r.next()
        existential.append(Var(r.next().text))
        while r.at(","):
            r.next()
            t = r.next()
            if t.kind != "IDENT":
                raise _Error(t, "expected a variable name")
            existential.append(Var(t.text))
        r.expect(".")
    atom_tokens.append(r.peek())
    head = r.atom(_rule_term)
    r.expect(".")

    ok = True
    if conns and any(c != conns[0][1] for _, c in conns):
        bad = next(tok for tok, c in conns if c != conns[0][1])
        r.error(bad, "mixed connectives in one rule; use a single connective per rule")
        ok = False
    for lit, tok in zip([lit.atom for lit in body] + [head], atom_tokens):
        ok = arities.check(lit, tok) and ok
    if not ok:
        return None
    try:
        return Rule(rule_id, tuple(body), head,
                    conns[0][1] if conns else TNorm("min"), tuple(existential))
    except ValidationError as exc:
        for m in exc.messages:
            r.error(start, m)
        return None


def parse_program(text: str, *, source: Optional[str] = None) -> Program:
    """Parse and validate a program; raise :class:`ParseError` on any problem."""
    r = _Reader(text)
    arities = _ArityTable(r)
    rules = []
    while r.peek().kind != "EOF":
        try:
            rule = _parse_rule(r, len(rules), arities)
        except _Error as e:
            r.error(e.token, e.message)
            r.recover()
            continue
        if rule is not None:
            rules.append(rule)
    if r.diags:
        raise ParseError(r.diags, source)
    try:
        return Program(tuple(rules))
    except ValidationError as exc:
        raise ParseError([Diagnostic(1, 1, m) for m in exc.messages], source) from None


def parse_dataset(text: str, *, source: Optional[str] = None, arities=None):
    """Parse a fuzzy dataset.  A missing degree annotation means 1.

    ``arities`` (predicate -> arity), when given, is checked as well, e.g.
    with ``program.arities``.
    """
    from ..model import FuzzyDataset

    r = _Reader(text)
    table = _ArityTable(r)
    if arities:
        table.arities.update(arities)
    facts: dict[Atom, float] = {}
    while r.peek().kind != "EOF":
        try:
            d = 1.0
            dtok = r.peek()
            if dtok.kind == "NUMBER" and r.at("::", 1):
                d = r.number()
                r.next()
                if not 0.0 < d <= 1.0:
                    raise _Error(dtok, f"degree {dtok.text} must lie in (0, 1]")
            atok = r.peek()
            atom = r.atom(_ground_term)
            r.expect(".")
        except _Error as e:
            r.error(e.token, e.message)
            r.recover()
            continue
        if not table.check(atom, atok):
            continue
        if atom in facts:
            r.error(atok, f"duplicate fact {atom}")
            continue
        facts[atom] = d
    if r.diags:
        raise ParseError(r.diags, source)
    return FuzzyDataset(facts)


def parse_atom(text: str, *, variables: bool = False) -> Atom:
    """Parse a single atom, e.g. a goal.

    Identifiers are constants unless ``variables`` is true, in which case
    they are variables and constants must be quoted (rule syntax).
    """
    r = _Reader(text.strip().rstrip("."))
    try:
        atom = r.atom(_rule_term if variables else _ground_term)
        if r.peek().kind != "EOF":
            raise _Error(r.peek(), f"unexpected {r.peek().text!r} after atom")
    except _Error as e:
        raise ParseError([Diagnostic(e.token.line, e.token.col, e.message)]) from None
    return atom
