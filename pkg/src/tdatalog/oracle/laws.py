"""Randomized checks of the t-norm axioms, plus a deliberately broken t-norm."""
from __future__ import annotations

import random
from typing import NamedTuple, Optional

from ..degrees import TNorm, register_tnorm

BROKEN = "broken"

# exact arithmetic for these; a small tolerance for the rest
EXACT = frozenset({"min", "luk"})
TOLERANCE = 1e-12


class LawFailure(NamedTuple):
    law: str
    tnorm: str
    inputs: tuple
    values: tuple

    def __str__(self):
        args = ", ".join(repr(x) for x in self.inputs)
        vals = ", ".join(repr(x) for x in self.values)
        return f"{self.tnorm}: {self.law} fails at ({args}): {vals}"


def _broken(a: float, b: float) -> float:
    # commutative with identity 1, but dips when the arguments differ
    if a == 1.0 or b == 1.0:
        return min(a, b)
    return min(a, b) * (1.0 - abs(a - b))


def install_broken_tnorm() -> TNorm:
    """Register the non-monotone connective ``&broken`` (negative control)."""
    register_tnorm(BROKEN, _broken, replace=True)
    return TNorm(BROKEN)


def _sample(rng: random.Random) -> float:
    r = rng.random()
    if r < 0.05:
        return 0.0
    if r < 0.10:
        return 1.0
    if r < 0.30:
        return rng.randint(0, 10) / 10
    return rng.random()


def check_tnorm_laws(spec: TNorm, samples: int = 100_000, seed: int = 0,
                     tol: Optional[float] = None, limit: int = 3) -> list[LawFailure]:
    """Commutativity, associativity, monotonicity, identity, the bound by
    ``min`` and Boolean agreement, on ``samples`` random triples.

    Returns at most ``limit`` failures per law.
    """
    if tol is None:
        tol = 0.0 if spec.name in EXACT else TOLERANCE
    f = spec._fn
    name = str(spec)
    out: list[LawFailure] = []
    seen: dict[str, int] = {}

    def fail(law, inputs, values):
        if seen.get(law, 0) < limit:
            seen[law] = seen.get(law, 0) + 1
            out.append(LawFailure(law, name, inputs, values))

    for a in (0.0, 1.0):
        for b in (0.0, 1.0):
            v = f(a, b)
            if v != float(a == 1.0 and b == 1.0):
                fail("boolean", (a, b), (v,))
    rng = random.Random(seed)
    for _ in range(samples):
        a, b, c = _sample(rng), _sample(rng), _sample(rng)
        ab, ba = f(a, b), f(b, a)
        if abs(ab - ba) > tol:
            fail("commutativity", (a, b), (ab, ba))
        left, right = f(ab, c), f(a, f(b, c))
        if abs(left - right) > tol:
            fail("associativity", (a, b, c), (left, right))
        lo, hi = (b, c) if b <= c else (c, b)
        flo, fhi = f(a, lo), f(a, hi)
        if flo > fhi + tol:
            fail("monotonicity", (a, lo, hi), (flo, fhi))
        one = f(a, 1.0)
        if abs(one - a) > tol:
            fail("identity", (a,), (one,))
        if ab > min(a, b) + tol:
            fail("bounded by min", (a, b), (ab,))
        if not 0.0 <= ab <= 1.0:
            fail("range", (a, b), (ab,))
    return out
