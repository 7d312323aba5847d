"""Direct check of the stratification conditions."""
from __future__ import annotations

from ..lang.analysis import StratificationResult
from ..lang.syntax import Program


def verify_stratification(program: Program, strat: StratificationResult) -> list[str]:
    """Violated conditions, as messages; empty when ``strat`` is valid."""
    out = []
    idb = program.idb()
    placed = [r for stratum in strat.strata for r in stratum]
    if sorted(r.id for r in placed) != sorted(r.id for r in program.rules) \
            or set(placed) != set(program.rules):
        out.append("(i) strata do not partition the program")
    zeta: dict = {}
    for i, stratum in enumerate(strat.strata, start=1):
        for r in stratum:
            zeta.setdefault(r.head.predicate, set()).add(i)
    for p, levels in zeta.items():
        if len(levels) > 1:
            out.append(f"(ii) rules for {p} are spread over strata {sorted(levels)}")
    level = {p: min(v) for p, v in zeta.items()}
    for r in program.rules:
        h = level.get(r.head.predicate)
        for lit in r.body:
            q = lit.atom.predicate
            if q not in idb or h is None or q not in level:
                continue  # unplaced rules are reported under (i)
            if lit.op is None and not level[q] <= h:
                out.append(f"(iii) rule {r.id}: {q} at {level[q]} above head at {h}")
            if lit.op is not None and not level[q] < h:
                out.append(f"(iv) rule {r.id}: {lit.op}{q} at {level[q]} not below head at {h}")
    return out
