"""Text rendering of atoms, rules, programs and datasets.

The output of :func:`format_program` parses back to an equal program.
"""
from __future__ import annotations

import re

from .syntax import Atom, Null, Var

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"exists", "delta"})


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_term(t, *, rule_context: bool = False) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Null):
        return t.name
    # in rules bare identifiers are variables, so constants are always quoted
    if rule_context or not _IDENT.match(t) or t in KEYWORDS:
        return quote(t)
    return t


def format_atom(atom: Atom, *, rule_context: bool = False) -> str:
    if not atom.args:
        return atom.predicate
    inner = ", ".join(format_term(a, rule_context=rule_context) for a in atom.args)
    return f"{atom.predicate}({inner})"


def format_rule(rule) -> str:
    parts = []
    conns = rule.connectives
    for i, lit in enumerate(rule.body):
        if i:
            parts.append(str(conns[i - 1]))
        text = format_atom(lit.atom, rule_context=True)
        parts.append(f"{lit.op}{text}" if lit.op is not None else text)
    body = " ".join(parts)
    head = format_atom(rule.head, rule_context=True)
    if rule.existential_vars:
        ex = ", ".join(v.name for v in rule.existential_vars)
        head = f"exists {ex} . {head}"
    return f"{body} -> {head}."


def format_program(program) -> str:
    lines = []
    for rule in program.rules:
        lines.append(format_rule(rule))
    return "\n".join(lines) + ("\n" if lines else "")


def format_degree(d: float, places: int = 6) -> str:
    return f"{d:.{places}f}"


def format_fact(atom: Atom, d: float, *, places=None) -> str:
    deg = repr(d) if places is None else format_degree(d, places)
    return f"{deg} :: {format_atom(atom)}."
