"""Exponential generating functions of omega_s-marked diagrams by type.

``F_of_type`` builds the function A(z) of diagrams from which every diagram
of the type arises by inserting decoration-1 root chords, then applies the
root-insertion closure.  A(z) has three sources:

* the lone chord of decoration delta, when there are no gaps or
  nonterminals;
* a root of decoration d in D whose deletion leaves one component;
* a root whose deletion disconnects the diagram.  The last component D_r is
  split off, leaving C1 (at least two chords) and C2 = root + D_r.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Tuple

from .diagrams import DiagramType
from .symexpr import LogExpr, root_insertion_closure

_memo: Dict[Tuple[DiagramType, int], "TypeGFEntry"] = {}


@dataclass(frozen=True)
class TypeGFEntry:
    type: DiagramType
    s: int
    F: LogExpr
    base_A: LogExpr

    def to_json(self) -> dict:
        return {"type": self.type.to_json(), "s": self.s, "F": self.F.to_json()}


def t_value(T: DiagramType) -> int:
    return T.t


def enumerate_types(k: int) -> List[DiagramType]:
    """All types with t-value <= k, by t, then delta, then multisets."""
    if k < 0:
        return []
    # every gap pair or nonterminal costs at least 1 towards t
    items = [("g", (d, g), d + g - 1) for d in range(1, k + 1) for g in range(1, k + 2 - d)]
    items += [("d", d, d - 1) for d in range(2, k + 2)]
    out = []
    for delta in range(1, k + 2):
        budget = k - (delta - 1)
        for chosen in _multisets(items, budget):
            gaps = tuple(x for kind, x, _ in chosen if kind == "g")
            nonterm = tuple(x for kind, x, _ in chosen if kind == "d")
            out.append(DiagramType(delta, gaps, nonterm))
    return sorted(out, key=lambda T: (T.t, T.delta, T.gaps, T.nonterminals))


def _multisets(items, budget, start=0):
    yield ()
    for idx in range(start, len(items)):
        cost = items[idx][2]
        if cost <= budget:
            for rest in _multisets(items, budget - cost, idx):
                yield (items[idx],) + rest


def _splits(values: Tuple) -> Iterator[Tuple[Tuple, Tuple]]:
    """Distinct ways to split a sorted multiset into (first, second)."""
    counts = sorted(Counter(values).items())
    for picks in itertools.product(*(range(c + 1) for _, c in counts)):
        first, second = [], []
        for (v, c), p in zip(counts, picks):
            first += [v] * p
            second += [v] * (c - p)
        yield tuple(first), tuple(second)


def _remove_one(values: Tuple, v) -> Tuple:
    lst = list(values)
    lst.remove(v)
    return tuple(lst)


def F_of_type(T: DiagramType, s: int, cache: bool = True) -> TypeGFEntry:
    memo = _memo if cache else {}
    return _compute(T, s, memo)


def clear_cache():
    _memo.clear()


def _compute(T: DiagramType, s: int, memo) -> TypeGFEntry:
    key = (T, s)
    if key in memo:
        return memo[key]
    z = LogExpr.z(s)
    A = LogExpr(s)
    if not T.gaps and not T.nonterminals:
        A = A + LogExpr.from_z_polynomial([0] * T.delta + [Fraction(1, math.factorial(T.delta))], s)
    for d in sorted(set(T.nonterminals)):
        sub = _compute(DiagramType(T.delta, T.gaps, _remove_one(T.nonterminals, d)), s, memo).F
        A = A + z * sub.integrate(d - 1) * s - sub.integrate(d) * (s * d + 1)
    seen = set()
    for first in sorted(set(T.gaps)):
        delta2, gamma = first
        rest_g = _remove_one(T.gaps, first)
        for g2, g1 in _splits(rest_g):
            for d2, d1 in _splits(T.nonterminals):
                if gamma == 1 and (g2 or d2):
                    continue
                marker = (first, g1, g2, d1, d2)
                if marker in seen:
                    continue
                seen.add(marker)
                m = gamma + delta2 - 1 + sum(d + g - 1 for d, g in g2) + sum(d - 1 for d in d2)
                count_m = _compute(DiagramType(delta2, g2, d2), s, memo).F.coefficient(m) * math.factorial(m)
                if not count_m or s * m - 1 == 0:
                    continue
                F1 = _compute(DiagramType(T.delta, g1, d1), s, memo).F
                if not g1 and not d1:
                    # C1 keeps its root plus at least one component
                    F1 = F1 - LogExpr.from_z_polynomial(
                        [0] * T.delta + [Fraction(1, math.factorial(T.delta))], s
                    )
                A = A + F1.integrate(m) * ((s * m - 1) * count_m)
    entry = TypeGFEntry(T, s, root_insertion_closure(A), A)
    memo[key] = entry
    return entry
