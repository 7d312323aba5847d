"""Truth degrees, t-norms and unary operators.

Degrees are plain Python floats in [0, 1].  Connectives are described by
small immutable specs (:class:`TNorm`, :class:`UnaryOp`) that resolve their
implementing function through a registry, so user code can add connectives
with :func:`register_tnorm` / :func:`register_unary` and the parser will
accept them by name.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import ConfigError, ContractViolation, DegreeError

__all__ = [
    "degree",
    "TNorm",
    "UnaryOp",
    "register_tnorm",
    "register_unary",
    "registered_tnorms",
    "registered_unary_ops",
    "tnorm_apply",
    "tnorm_fold",
    "unary_apply",
    "MIN",
    "LUK",
    "PROD",
]


def degree(value) -> float:
    """Validate and return ``value`` as a truth degree."""
    try:
        d = float(value)
    except (TypeError, ValueError) as exc:
        raise DegreeError(f"not a number: {value!r}") from exc
    if not 0.0 <= d <= 1.0:  # also rejects NaN
        raise DegreeError(f"truth degree {value!r} outside [0, 1]")
    return d


# -- t-norm implementations ------------------------------------------------

def _t_min(a: float, b: float) -> float:
    return a if a <= b else b


def _t_luk(a: float, b: float) -> float:
    # a + b - 1 is always representable when it is >= 0, and fsum rounds
    # correctly, so this is exact (and therefore exactly associative).
    s = math.fsum((a, b, -1.0))
    return s if s > 0.0 else 0.0


def _t_prod(a: float, b: float) -> float:
    return a * b


def _t_ss(a: float, b: float, p: float) -> float:
    if a == 1.0:
        return b
    if b == 1.0:
        return a
    if a == 0.0 or b == 0.0:
        return 0.0
    try:
        s = a ** p + b ** p - 1.0
        r = s ** (1.0 / p)
    except OverflowError:
        return 0.0
    # rounding may push the result a few ulps over min(a, b)
    m = a if a <= b else b
    if r > m:
        return m
    return r if r > 0.0 else 0.0


def _check_ss_param(p):
    if p is None:
        raise ConfigError("ss requires a parameter p < 0")
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p < 0):
        raise ConfigError(f"ss parameter must be a finite number < 0, got {p!r}")


@dataclass(frozen=True)
class _Connective:
    fn: Callable
    takes_param: bool
    check_param: Optional[Callable] = None


_TNORMS: dict[str, _Connective] = {
    "min": _Connective(_t_min, False),
    "luk": _Connective(_t_luk, False),
    "prod": _Connective(_t_prod, False),
    "ss": _Connective(_t_ss, True, _check_ss_param),
}


def register_tnorm(name: str, fn: Callable, *, takes_param: bool = False,
                   check_param: Optional[Callable] = None,
                   replace: bool = False) -> None:
    """Register a binary connective under ``name``.

    ``fn(a, b)`` (or ``fn(a, b, p)`` when ``takes_param``) must map degrees
    to a degree.  The t-norm laws are not verified here; see
    :func:`tdatalog.oracle.check_tnorm_laws`.
    """
    if not name.isidentifier():
        raise ConfigError(f"connective name must be an identifier: {name!r}")
    if name in _TNORMS and not replace:
        raise ConfigError(f"t-norm {name!r} is already registered")
    _TNORMS[name] = _Connective(fn, takes_param, check_param)


def unregister_tnorm(name: str) -> None:
    if name in ("min", "luk", "prod", "ss"):
        raise ConfigError(f"cannot remove built-in t-norm {name!r}")
    _TNORMS.pop(name, None)


def registered_tnorms() -> tuple[str, ...]:
    return tuple(_TNORMS)


@dataclass(frozen=True)
class TNorm:
    """A t-norm by registered name, with an optional real parameter."""

    name: str
    param: Optional[float] = None
    _fn: Callable = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        entry = _TNORMS.get(self.name)
        if entry is None:
            raise ConfigError(f"unknown t-norm {self.name!r}")
        if entry.takes_param:
            if entry.check_param is not None:
                entry.check_param(self.param)
            p = float(self.param)
            object.__setattr__(self, "param", p)
            fn = entry.fn
            object.__setattr__(self, "_fn", lambda a, b: fn(a, b, p))
        else:
            if self.param is not None:
                raise ConfigError(f"t-norm {self.name!r} takes no parameter")
            object.__setattr__(self, "_fn", entry.fn)

    def __call__(self, a: float, b: float) -> float:
        return self._fn(a, b)

    def fold(self, degrees: Sequence[float]) -> float:
        return tnorm_fold(self, degrees)

    def __str__(self):
        if self.param is None:
            return f"&{self.name}"
        return f"&{self.name}({_fmt_param(self.param)})"


MIN = TNorm("min")
LUK = TNorm("luk")
PROD = TNorm("prod")


def _fmt_param(p: float) -> str:
    r = repr(float(p))
    return r[:-2] if r.endswith(".0") else r


def tnorm_apply(spec: TNorm, a: float, b: float) -> float:
    return spec._fn(degree(a), degree(b))


def tnorm_fold(spec: Union[TNorm, Sequence[TNorm]], degrees: Iterable[float]) -> float:
    """Left-to-right fold of ``degrees``.

    ``spec`` is one t-norm, or one t-norm per adjacent pair when a body
    mixes connectives (applied in fixed left-to-right order).
    """
    it = iter(degrees)
    try:
        acc = next(it)
    except StopIteration:
        raise ContractViolation("tnorm_fold needs at least one degree") from None
    if isinstance(spec, TNorm):
        fn = spec._fn
        for d in it:
            acc = fn(acc, d)
        return acc
    specs = list(spec)
    for i, d in enumerate(it):
        if i >= len(specs):
            raise ContractViolation("more degrees than connectives + 1")
        acc = specs[i]._fn(acc, d)
    return acc


# -- unary operators -------------------------------------------------------

def _u_neg(a: float) -> float:
    return 1.0 - a


def _u_nneg(a: float) -> float:
    return 1.0 if a == 0.0 else 0.0


def _u_delta(a: float, t: float) -> float:
    return 1.0 if a >= t else 0.0


def _check_threshold(t):
    if t is None:
        raise ConfigError("delta requires a threshold T in [0, 1]")
    try:
        degree(t)
    except DegreeError as exc:
        raise ConfigError(f"delta threshold must lie in [0, 1], got {t!r}") from exc


_UNARY: dict[str, _Connective] = {
    "neg": _Connective(_u_neg, False),
    "nneg": _Connective(_u_nneg, False),
    "delta": _Connective(_u_delta, True, _check_threshold),
}


def register_unary(name: str, fn: Callable, *, takes_param: bool = False,
                   check_param: Optional[Callable] = None,
                   replace: bool = False) -> None:
    if not name.isidentifier():
        raise ConfigError(f"operator name must be an identifier: {name!r}")
    if name in _UNARY and not replace:
        raise ConfigError(f"unary operator {name!r} is already registered")
    _UNARY[name] = _Connective(fn, takes_param, check_param)


def registered_unary_ops() -> tuple[str, ...]:
    return tuple(_UNARY)


@dataclass(frozen=True)
class UnaryOp:
    name: str
    param: Optional[float] = None
    _fn: Callable = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        entry = _UNARY.get(self.name)
        if entry is None:
            raise ConfigError(f"unknown unary operator {self.name!r}")
        if entry.takes_param:
            if entry.check_param is not None:
                entry.check_param(self.param)
            p = float(self.param)
            object.__setattr__(self, "param", p)
            fn = entry.fn
            object.__setattr__(self, "_fn", lambda a: fn(a, p))
        else:
            if self.param is not None:
                raise ConfigError(f"unary operator {self.name!r} takes no parameter")
            object.__setattr__(self, "_fn", entry.fn)

    def __call__(self, a: float) -> float:
        return self._fn(a)

    def __str__(self):
        if self.name == "neg":
            return "!"
        if self.name == "nneg":
            return "~"
        if self.name == "delta":
            return f"delta[{_fmt_param(self.param)}] "
        if self.param is None:
            return f"@{self.name} "
        return f"@{self.name}[{_fmt_param(self.param)}] "


def unary_apply(spec: UnaryOp, a: float) -> float:
    r = spec._fn(degree(a))
    return degree(r)
