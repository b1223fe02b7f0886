"""Rooted connected chord diagrams, their decorations, weights and markings.

A diagram is stored as its chords ``(a, b)`` sorted by left endpoint, so the
root chord ``(1, b)`` comes first.  Everything indexed "by chord" (decorations,
covering numbers, terminal positions) uses 1-based positions in the
intersection order, never the storage order.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .apoly import AMonomial

Chord = Tuple[int, int]


class DiagramError(ValueError):
    pass


class DuplicateEndpoint(DiagramError):
    pass


class EndpointOutOfRange(DiagramError):
    pass


class ReversedPair(DiagramError):
    pass


class NotConnected(DiagramError):
    pass


class NotMarked(DiagramError):
    pass


@dataclass(frozen=True, order=True)
class ChordDiagram:
    chords: Tuple[Chord, ...]

    def __len__(self):
        return len(self.chords)

    @property
    def root(self) -> Chord:
        return self.chords[0]

    def to_json(self) -> list:
        return [list(c) for c in self.chords]


def validate(raw: Sequence[Sequence[int]]) -> ChordDiagram:
    chords = [tuple(int(x) for x in pair) for pair in raw]
    n = len(chords)
    if n == 0:
        raise DiagramError("a diagram needs at least one chord")
    seen = set()
    for pair in chords:
        if len(pair) != 2:
            raise DiagramError(f"{pair} is not a pair")
        a, b = pair
        if a > b:
            raise ReversedPair(f"chord {pair} has a > b")
        if a == b:
            raise DuplicateEndpoint(f"chord {pair} uses {a} twice")
        for x in pair:
            if not 1 <= x <= 2 * n:
                raise EndpointOutOfRange(f"chord {pair}: endpoint {x} outside 1..{2 * n}")
            if x in seen:
                raise DuplicateEndpoint(f"chord {pair}: endpoint {x} already used")
            seen.add(x)
    return ChordDiagram(tuple(sorted(chords)))


def crosses(c: Chord, d: Chord) -> bool:
    """Directed intersection edge c -> d."""
    return c[0] < d[0] < c[1] < d[1]


def _components(chords: Sequence[Chord]) -> List[Tuple[Chord, ...]]:
    parent = list(range(len(chords)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, c in enumerate(chords):
        for j in range(i + 1, len(chords)):
            d = chords[j]
            if crosses(c, d) or crosses(d, c):
                parent[find(i)] = find(j)
    groups: Dict[int, List[Chord]] = {}
    for i, c in enumerate(chords):
        groups.setdefault(find(i), []).append(c)
    return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0][0])


def connected_components(C: ChordDiagram) -> List[Tuple[Chord, ...]]:
    """Weak components of the intersection graph, ordered by leftmost vertex."""
    return _components(C.chords)


def is_connected(C: ChordDiagram) -> bool:
    return len(_components(C.chords)) == 1


def _require_connected(C: ChordDiagram):
    if not is_connected(C):
        raise NotConnected(f"diagram {C.chords} is not connected")


def _order_of(chords: Tuple[Chord, ...]) -> List[Chord]:
    root, rest = chords[0], chords[1:]
    out = [root]
    for comp in _components(rest):
        out.extend(_order_of(comp))
    return out


def intersection_order(C: ChordDiagram) -> Tuple[Chord, ...]:
    """Chords listed in intersection order (label 1 first)."""
    _require_connected(C)
    return tuple(_order_of(C.chords))


def _terminal_positions(order: Sequence[Chord]) -> Tuple[int, ...]:
    return tuple(
        pos
        for pos, c in enumerate(order, 1)
        if not any(crosses(c, d) for d in order)
    )


def terminal_chords(C: ChordDiagram) -> Tuple[int, ...]:
    return _terminal_positions(intersection_order(C))


def _interval_labels(order: Sequence[Chord]) -> List[int]:
    # labels[i] for interval i (between dots i and i+1); index 0 unused
    labels = [0] * (2 * len(order))
    for pos, (a, b) in enumerate(order, 1):
        labels[a:b] = [pos] * (b - a)
    return labels


def _omega(order: Sequence[Chord]) -> Tuple[int, ...]:
    counts = Counter(_interval_labels(order)[1:])
    return tuple(counts[pos] - 1 for pos in range(1, len(order) + 1))


def interval_labels(C: ChordDiagram) -> Tuple[int, ...]:
    """Covering chord (intersection position) of each interval 1..2n-1."""
    return tuple(_interval_labels(intersection_order(C))[1:])


def covering_numbers(C: ChordDiagram) -> Tuple[int, ...]:
    return _omega(intersection_order(C))


def binom(x: int, k: int) -> int:
    """Falling-factorial binomial, valid for negative ``x``."""
    if k < 0:
        return 0
    num = 1
    for i in range(k):
        num *= x - i
    return num // math.factorial(k)


def weight_from_profile(decorations: Sequence[int], omega: Sequence[int], s: int) -> int:
    w = 1
    for d, om in zip(decorations, omega):
        w *= binom(d * s + om - 2, om)
        if not w:
            return 0
    return w


@dataclass(frozen=True, order=True)
class DiagramType:
    """(first-terminal decoration, terminal (decoration, gap) pairs, nonterminal decorations >= 2)."""

    delta: int
    gaps: Tuple[Tuple[int, int], ...] = ()
    nonterminals: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gaps", tuple(sorted(tuple(g) for g in self.gaps)))
        object.__setattr__(self, "nonterminals", tuple(sorted(self.nonterminals)))
        if self.delta < 1:
            raise ValueError("delta must be positive")
        if any(d < 1 or g < 1 for d, g in self.gaps):
            raise ValueError(f"bad gap pairs {self.gaps}")
        if any(d < 2 for d in self.nonterminals):
            raise ValueError(f"nonterminal decorations must be >= 2: {self.nonterminals}")

    @property
    def t(self) -> int:
        return (
            sum(d + g - 1 for d, g in self.gaps)
            + sum(d - 1 for d in self.nonterminals)
            + self.delta
            - 1
        )

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "gaps": [list(g) for g in self.gaps],
            "nonterminals": list(self.nonterminals),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DiagramType":
        return cls(int(data["delta"]), tuple(tuple(g) for g in data["gaps"]), tuple(data["nonterminals"]))

    def __str__(self):
        g = "{" + ",".join(f"({d},{gg})" for d, gg in self.gaps) + "}" if self.gaps else "{}"
        n = "{" + ",".join(map(str, self.nonterminals)) + "}" if self.nonterminals else "{}"
        return f"({self.delta},{g},{n})"


def type_from_profile(decorations: Sequence[int], terminals: Sequence[int]) -> DiagramType:
    """Type read off decorations (intersection order) and terminal positions."""
    t = list(terminals)
    delta = decorations[t[0] - 1]
    gaps = tuple((decorations[t[j] - 1], t[j] - t[j - 1]) for j in range(1, len(t)))
    term = set(t)
    nonterm = tuple(
        d for pos, d in enumerate(decorations, 1) if pos not in term and d != 1
    )
    return DiagramType(delta, gaps, nonterm)


def a_monomial_from_profile(decorations: Sequence[int], terminals: Sequence[int]) -> AMonomial:
    counts: Counter = Counter()
    term = set(terminals)
    for pos, d in enumerate(decorations, 1):
        if pos not in term:
            counts[(d, 0)] += 1
    t = list(terminals)
    for j in range(1, len(t)):
        counts[(decorations[t[j] - 1], t[j] - t[j - 1])] += 1
    return AMonomial.from_counts(counts)


@dataclass(frozen=True)
class DecoratedDiagram:
    """A connected diagram with positive decorations listed in intersection order."""

    base: ChordDiagram
    decorations: Tuple[int, ...]

    def __post_init__(self):
        if len(self.decorations) != len(self.base):
            raise DiagramError("one decoration per chord is required")
        if any(d < 1 for d in self.decorations):
            raise DiagramError("decorations must be positive")

    @classmethod
    def of(cls, chords, decorations=None) -> "DecoratedDiagram":
        base = chords if isinstance(chords, ChordDiagram) else validate(chords)
        _require_connected(base)
        decorations = tuple(decorations) if decorations is not None else (1,) * len(base)
        return cls(base, decorations)

    @cached_property
    def order(self) -> Tuple[Chord, ...]:
        return intersection_order(self.base)

    @cached_property
    def terminals(self) -> Tuple[int, ...]:
        return _terminal_positions(self.order)

    @cached_property
    def omega(self) -> Tuple[int, ...]:
        return _omega(self.order)

    @cached_property
    def labels(self) -> Tuple[int, ...]:
        return tuple(_interval_labels(self.order)[1:])

    @property
    def size(self) -> int:
        return sum(self.decorations)

    @property
    def t1(self) -> int:
        return self.terminals[0]

    def __len__(self):
        return len(self.base)

    def to_json(self) -> dict:
        return {"chords": self.base.to_json(), "decorations": list(self.decorations)}

    @classmethod
    def from_json(cls, data: dict) -> "DecoratedDiagram":
        return cls.of(data["chords"], data["decorations"])


def weight(C: DecoratedDiagram, s: int) -> int:
    return weight_from_profile(C.decorations, C.omega, s)


def diagram_type(C: DecoratedDiagram) -> DiagramType:
    return type_from_profile(C.decorations, C.terminals)


def a_monomial(C: DecoratedDiagram) -> AMonomial:
    return a_monomial_from_profile(C.decorations, C.terminals)


# ---------------------------------------------------------------------------
# Enumeration
#
# Every connected diagram with n >= 2 chords arises exactly once, either by
# inserting a root chord into a connected (n-1)-chord diagram (right endpoint
# in any of its 2n-3 intervals), or by merging C1 (connected, >= 2 chords)
# with C2 (connected, root deletion leaves one component): C2's non-root
# chords are spliced around the right endpoint of C1's root and C2's root is
# dropped.  Diagrams are carried as flat endpoint tuples in intersection
# order together with their terminal positions, both updated incrementally.
# ---------------------------------------------------------------------------

Flat = Tuple[int, ...]
_STORE_UP_TO = 7
_levels: Dict[int, List[Tuple[Flat, Tuple[int, ...]]]] = {1: [((1, 2), (1,))]}
_gamma1: Dict[int, List[Tuple[Flat, Tuple[int, ...]]]] = {1: []}


def _root_insert(flat: Flat, i: int) -> Flat:
    return (1, i + 2) + tuple(p + 1 if p <= i else p + 2 for p in flat)


def _merge(f1: Flat, f2: Flat) -> Flat:
    b1, b2 = f1[1], f2[1]
    left = b2 - 2
    right = len(f2) - b2
    head = tuple(p if p < b1 else p + left + right for p in f1[2:])
    tail = tuple(b1 + q - 2 if q < b2 else b1 + left + q - b2 for q in f2[2:])
    return (1, b1 + left) + head + tail


def _constructions(n: int) -> Iterator[Tuple[bool, Flat, Tuple[int, ...]]]:
    """(is_root_insertion, flat, terminals) for every connected n-chord diagram."""
    for flat, terms in _level(n - 1):
        shifted = tuple(t + 1 for t in terms)
        for i in range(1, 2 * n - 2):
            yield True, _root_insert(flat, i), shifted
    for n1 in range(2, n):
        n2 = n + 1 - n1
        for f1, t1 in _level(n1):
            for f2, t2 in _gamma1[n2] if n2 in _gamma1 else _ensure_gamma(n2):
                yield False, _merge(f1, f2), t1 + tuple(t + n1 - 1 for t in t2)


def _ensure_gamma(n: int):
    _level(n)
    return _gamma1[n]


def _level(n: int) -> List[Tuple[Flat, Tuple[int, ...]]]:
    if n not in _levels:
        level, gamma = [], []
        for is_ins, flat, terms in _constructions(n):
            level.append((flat, terms))
            if is_ins:
                gamma.append((flat, terms))
        _levels[n] = level
        _gamma1[n] = gamma
    return _levels[n]


def iter_connected_flat(n: int, part: int = 0, parts: int = 1) -> Iterator[Tuple[Flat, Tuple[int, ...]]]:
    """Stream connected n-chord diagrams as (flat intersection order, terminals).

    Order is deterministic but not canonical.  ``part``/``parts`` select a
    residue class of the stream so it can be split across workers.
    """
    if n < 1:
        return
    if n <= _STORE_UP_TO or n in _levels:
        for idx, item in enumerate(_level(n)):
            if idx % parts == part:
                yield item
        return
    for idx, (_, flat, terms) in enumerate(_constructions(n)):
        if idx % parts == part:
            yield flat, terms


def flat_to_order(flat: Flat) -> Tuple[Chord, ...]:
    return tuple(zip(flat[::2], flat[1::2]))


def connected_diagrams(n: int) -> List[ChordDiagram]:
    """All connected n-chord diagrams in canonical order."""
    return sorted(ChordDiagram(tuple(sorted(flat_to_order(f)))) for f, _ in iter_connected_flat(n))


def all_pairings(n: int) -> Iterator[ChordDiagram]:
    """Every perfect matching of 1..2n (the (2n-1)!! brute force)."""

    def rec(points):
        if not points:
            yield ()
            return
        a = points[0]
        for idx in range(1, len(points)):
            b = points[idx]
            for rest in rec(points[1:idx] + points[idx + 1:]):
                yield ((a, b),) + rest

    for chords in rec(tuple(range(1, 2 * n + 1))):
        yield ChordDiagram(tuple(sorted(chords)))


def connected_by_filtering(n: int) -> List[ChordDiagram]:
    return sorted(C for C in all_pairings(n) if is_connected(C))


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Compositions of ``total`` into ``parts`` positive integers, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def weak_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ways to drop ``total`` identical marks into ``parts`` slots."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_decorated(size: int) -> Iterator[DecoratedDiagram]:
    """Every decorated connected diagram of the given size, each once.

    Ordered by chord count, then canonical diagram order, then decoration
    vector.
    """
    for n in range(1, size + 1):
        for base in connected_diagrams(n):
            for decos in compositions(size, n):
                yield DecoratedDiagram(base, decos)


# ---------------------------------------------------------------------------
# Markings
# ---------------------------------------------------------------------------


def _mark_budget(d: int, omega: int, s: int) -> Optional[int]:
    """Marks owed by a chord, or None if the chord forbids any marking."""
    if s == 1 and d == 1:
        return 0 if omega == 0 else None
    return d * s - 2


def enumerate_markings(C: DecoratedDiagram, s: int) -> Iterator[Tuple[int, ...]]:
    """Per-interval mark counts (intervals 1..2n-1) making C omega_s-marked."""
    labels = C.labels
    owned: List[List[int]] = [[] for _ in range(len(C))]
    for idx, lab in enumerate(labels):
        owned[lab - 1].append(idx)
    per_chord = []
    for pos, d in enumerate(C.decorations):
        budget = _mark_budget(d, C.omega[pos], s)
        if budget is None:
            return
        per_chord.append(list(weak_compositions(budget, len(owned[pos]))))
    for choice in itertools.product(*per_chord):
        marks = [0] * len(labels)
        for pos, dist in enumerate(choice):
            for idx, m in zip(owned[pos], dist):
                marks[idx] = m
        yield tuple(marks)


def count_markings(C: DecoratedDiagram, s: int) -> int:
    return sum(1 for _ in enumerate_markings(C, s))


def is_marked(C: DecoratedDiagram, marks: Sequence[int], s: int) -> bool:
    labels = C.labels
    if len(marks) != len(labels) or any(m < 0 for m in marks):
        return False
    held = [0] * len(C)
    for lab, m in zip(labels, marks):
        held[lab - 1] += m
    for pos, d in enumerate(C.decorations):
        budget = _mark_budget(d, C.omega[pos], s)
        if budget is None or held[pos] != budget:
            return False
    return True


def gap_count(C: DecoratedDiagram, marks: Sequence[int], s: int) -> int:
    if not is_marked(C, marks, s):
        raise NotMarked(f"marks {tuple(marks)} do not make {C.base.chords} omega_{s}-marked")
    return 2 * len(C) - 1 + sum(marks)


def delete_root(C: DecoratedDiagram, marks: Sequence[int]) -> Tuple[DecoratedDiagram, Tuple[int, ...]]:
    """Remove the root chord of a marked diagram whose remainder is connected.

    The root's own interval (and its marks) disappears; the two intervals
    around its right endpoint merge and pool their marks.
    """
    if len(C) < 2:
        raise DiagramError("cannot delete the root of a one-chord diagram")
    b = C.base.root[1]

    def shift(p):
        return p - 1 if p < b else p - 2

    rest = ChordDiagram(tuple(sorted((shift(x), shift(y)) for x, y in C.base.chords[1:])))
    if not is_connected(rest):
        raise NotConnected("root deletion disconnects the diagram")
    # marks[k] is interval k+1; the root covers interval 1 only
    merged = marks[b - 2] + marks[b - 1]
    new_marks = tuple(marks[1:b - 2]) + (merged,) + tuple(marks[b:])
    return DecoratedDiagram(rest, C.decorations[1:]), new_marks
