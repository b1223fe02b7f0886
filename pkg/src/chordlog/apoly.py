"""Exact polynomials in the primitive-expansion symbols a[i,j].

``a[i,j]`` is the coefficient of rho^(j-1) in the expansion of the i-loop
primitive.  Monomials are stored as sorted tuples ``((i, j, power), ...)``;
only ``a[1,0]`` is expected to carry negative powers, and only in
intermediate results.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

Key = Tuple[Tuple[int, int, int], ...]


class UnassignedSymbol(KeyError):
    pass


def _key_from_counts(counts: Mapping[Tuple[int, int], int]) -> Key:
    return tuple(sorted((i, j, p) for (i, j), p in counts.items() if p != 0))


def key_mul(k1: Key, k2: Key) -> Key:
    if not k1:
        return k2
    if not k2:
        return k1
    counts: Dict[Tuple[int, int], int] = {}
    for i, j, p in k1:
        counts[(i, j)] = p
    for i, j, p in k2:
        counts[(i, j)] = counts.get((i, j), 0) + p
    return _key_from_counts(counts)


def key_pow(k: Key, e: int) -> Key:
    if e == 0:
        return ()
    return tuple((i, j, p * e) for i, j, p in k)


@dataclass(frozen=True)
class AMonomial:
    """``coeff * prod a[i,j]**p``."""

    coeff: Fraction
    factors: Key = ()

    @classmethod
    def symbol(cls, i: int, j: int, power: int = 1) -> "AMonomial":
        if j < 0:
            raise ValueError(f"a[{i},{j}] has negative expansion index")
        return cls(Fraction(1), ((i, j, power),) if power else ())

    @classmethod
    def from_counts(cls, counts: Mapping[Tuple[int, int], int], coeff=1) -> "AMonomial":
        return cls(Fraction(coeff), _key_from_counts(counts))

    def __mul__(self, other):
        if isinstance(other, AMonomial):
            return AMonomial(self.coeff * other.coeff, key_mul(self.factors, other.factors))
        return AMonomial(self.coeff * Fraction(other), self.factors)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "AMonomial":
        return AMonomial(self.coeff ** e, key_pow(self.factors, e))

    def power_of(self, i: int, j: int) -> int:
        for fi, fj, p in self.factors:
            if (fi, fj) == (i, j):
                return p
        return 0

    def to_json(self) -> dict:
        return {"coeff": _frac_str(self.coeff), "factors": [list(f) for f in self.factors]}

    @classmethod
    def from_json(cls, data: dict) -> "AMonomial":
        counts = {(int(i), int(j)): int(p) for i, j, p in data["factors"]}
        return cls.from_counts(counts, Fraction(data["coeff"]))


class APolynomial:
    """Finite sum of monomials with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, Fraction] | None = None):
        self.terms: Dict[Key, Fraction] = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = Fraction(c)

    @classmethod
    def constant(cls, c) -> "APolynomial":
        return cls({(): Fraction(c)})

    @classmethod
    def from_monomial(cls, m: AMonomial) -> "APolynomial":
        return cls({m.factors: m.coeff})

    @classmethod
    def symbol(cls, i: int, j: int) -> "APolynomial":
        return cls.from_monomial(AMonomial.symbol(i, j))

    @classmethod
    def sum(cls, items: Iterable["APolynomial"]) -> "APolynomial":
        acc: Dict[Key, Fraction] = {}
        for p in items:
            for k, c in p.terms.items():
                acc[k] = acc.get(k, 0) + c
        return cls(acc)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, APolynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == APolynomial.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _as_apoly(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0) + c
        return APolynomial(acc)

    __radd__ = __add__

    def __neg__(self):
        return APolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_apoly(other))

    def __rsub__(self, other):
        return _as_apoly(other) - self

    def __mul__(self, other):
        if isinstance(other, AMonomial):
            return APolynomial({key_mul(k, other.factors): c * other.coeff for k, c in self.terms.items()})
        if isinstance(other, (int, Fraction)):
            return APolynomial({k: c * other for k, c in self.terms.items()})
        other = _as_apoly(other)
        acc: Dict[Key, Fraction] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = key_mul(k1, k2)
                acc[k] = acc.get(k, 0) + c1 * c2
        return APolynomial(acc)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = APolynomial.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def monomials(self):
        """Monomials in canonical (sorted key) order."""
        return [AMonomial(self.terms[k], k) for k in sorted(self.terms)]

    def symbols(self):
        return {(i, j) for k in self.terms for i, j, _ in k}

    def min_power(self, i: int, j: int) -> int:
        return min((AMonomial(c, k).power_of(i, j) for k, c in self.terms.items()), default=0)

    def evaluate(self, avals: Mapping[Tuple[int, int], Fraction]) -> Fraction:
        total = Fraction(0)
        for k, c in self.terms.items():
            term = c
            for i, j, p in k:
                try:
                    v = avals[(i, j)]
                except KeyError:
                    raise UnassignedSymbol(f"a[{i},{j}] has no value") from None
                term *= Fraction(v) ** p
            total += term
        return total

    def to_json(self) -> list:
        return [m.to_json() for m in self.monomials()]

    @classmethod
    def from_json(cls, data: list) -> "APolynomial":
        return cls.sum(cls.from_monomial(AMonomial.from_json(m)) for m in data)

    def __repr__(self):
        return f"APolynomial({format_apoly(self)})"


def _as_apoly(x) -> APolynomial:
    if isinstance(x, APolynomial):
        return x
    if isinstance(x, AMonomial):
        return APolynomial.from_monomial(x)
    return APolynomial.constant(x)


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(key: Key, latex: bool = False) -> str:
    parts = []
    for i, j, p in key:
        sym = f"a_{{{i},{j}}}" if latex else f"a[{i},{j}]"
        if p == 1:
            parts.append(sym)
        elif latex:
            parts.append(f"{sym}^{{{p}}}")
        else:
            parts.append(f"{sym}^{p}")
    return ("" if latex else "*").join(parts)


def format_apoly(p: APolynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for k in sorted(p.terms):
        c = p.terms[k]
        mono = format_monomial(k)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_frac_str(mag)}*{mono}"
        else:
            body = _frac_str(mag)
        out.append((sign, body))
    head_sign, head = out[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text
