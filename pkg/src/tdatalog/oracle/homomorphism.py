"""Search for degree-non-decreasing homomorphisms between interpretations."""
from __future__ import annotations

from typing import Optional

from ..errors import Undecided
from ..lang.syntax import Atom, Null


def find_ndf_homomorphism(source, target, cap: int = 10**6) -> Optional[dict]:
    """A map ``h`` on the nulls of ``source`` with ``source(A) <= target(h(A))``.

    Constants map to themselves.  Candidate images are the terms of the
    target's support.  Returns the map, or ``None`` if there is none; raises
    :class:`Undecided` once ``cap`` partial maps have been tried.
    """
    nulls = sorted({t for a in source for t in a.args if isinstance(t, Null)},
                   key=lambda n: n.name)
    image = sorted({t for a in target for t in a.args}, key=str)
    # each atom is checked as soon as its last null is assigned
    pos = {n: i for i, n in enumerate(nulls)}
    waiting: list[list[tuple[Atom, float]]] = [[] for _ in nulls]
    for atom, d in source.items():
        ns = [pos[t] for t in atom.args if isinstance(t, Null)]
        if not ns:
            if target[atom] < d:
                return None
        else:
            waiting[max(ns)].append((atom, d))
    h: dict = {}
    tried = 0

    def ok(i):
        for atom, d in waiting[i]:
            img = Atom(atom.predicate, tuple(h[t] if isinstance(t, Null) else t
                                             for t in atom.args))
            if target[img] < d:
                return False
        return True

    def search(i):
        nonlocal tried
        if i == len(nulls):
            return True
        for t in image:
            tried += 1
            if tried > cap:
                raise Undecided(f"homomorphism search exceeded {cap} candidates")
            h[nulls[i]] = t
            if ok(i) and search(i + 1):
                return True
        del h[nulls[i]]
        return False

    return dict(h) if search(0) else None
