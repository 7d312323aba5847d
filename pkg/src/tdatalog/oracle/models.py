"""Sampling of small fuzzy models for universality checks."""
from __future__ import annotations

import random
from typing import Iterator

from ..chase import StrategyConfig, check_k_model, run_chase
from ..lang.syntax import Atom, Program
from ..model import FuzzyInterpretation


def degree_grid(dataset, program: Program) -> list[float]:
    """Degrees reachable by folding dataset degrees with the program's
    connectives (two levels deep), plus 1."""
    base = sorted(set(dataset.values()) | {1.0})
    conns = {c for r in program.rules for c in r.connectives}
    grid = set(base)
    for _ in range(2):
        grid |= {c(a, b) for c in conns for a in list(grid) for b in base}
        if len(grid) > 64:
            break
    return sorted(d for d in grid if d > 0.0)


def sample_models(program: Program, dataset, rng: random.Random, count: int = 3,
                  K: float = 1.0, bumps: int = 4, max_steps: int = 20_000) -> Iterator[FuzzyInterpretation]:
    """Models of ``(program, dataset)`` built by raising a few random atoms
    over the active domain (plus one fresh constant) to grid degrees and
    closing the result under the rules with the restricted chase."""
    grid = degree_grid(dataset, program)
    consts = sorted({t for a in dataset for t in a.args} | {"fresh"})
    preds = sorted(program.arities.items())
    for _ in range(count):
        start = FuzzyInterpretation(dataset)
        for _ in range(rng.randint(0, bumps)):
            name, n = rng.choice(preds)
            atom = Atom(name, tuple(rng.choice(consts) for _ in range(n)))
            start[atom] = max(start[atom], rng.choice(grid))
        res = run_chase(program, start, StrategyConfig(K=K, max_steps=max_steps))
        if res.completed and check_k_model(res.interpretation, program, K):
            yield res.interpretation

