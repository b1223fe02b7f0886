"""Closed forms sum c * w**(m/s) * ln(w)**b with w = 1 - s*z.

Exponents are stored as integer numerators over the fixed denominator s, so
every element of the ring is a finite map (m, b) -> Fraction.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple

Term = Tuple[int, int]


class MismatchedS(ValueError):
    pass


class DomainError(ValueError):
    pass


class LogExpr:
    __slots__ = ("s", "terms")

    def __init__(self, s: int, terms: Mapping[Term, Fraction] | None = None):
        if s < 1:
            raise ValueError("s must be positive")
        self.s = s
        self.terms: Dict[Term, Fraction] = {}
        for (m, b), c in (terms or {}).items():
            if b < 0:
                raise ValueError("log power must be nonnegative")
            if c:
                self.terms[(m, b)] = Fraction(c)

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, s: int, c) -> "LogExpr":
        return cls(s, {(0, 0): Fraction(c)})

    @classmethod
    def basis(cls, s: int, m: int, b: int = 0, c=1) -> "LogExpr":
        return cls(s, {(m, b): Fraction(c)})

    @classmethod
    def z(cls, s: int) -> "LogExpr":
        return cls.from_z_polynomial([0, 1], s)

    @classmethod
    def from_z_polynomial(cls, coeffs: Sequence, s: int) -> "LogExpr":
        """Rewrite sum coeffs[k] z**k via z = (1 - w)/s."""
        acc: Dict[Term, Fraction] = {}
        for k, ck in enumerate(coeffs):
            ck = Fraction(ck)
            if not ck:
                continue
            scale = ck / Fraction(s) ** k
            for j in range(k + 1):
                key = (j * s, 0)
                acc[key] = acc.get(key, 0) + scale * math.comb(k, j) * (-1) ** j
        return cls(s, acc)

    # ring operations ------------------------------------------------------

    def _check(self, other: "LogExpr"):
        if other.s != self.s:
            raise MismatchedS(f"cannot combine s={self.s} with s={other.s}")

    def _coerce(self, other) -> "LogExpr":
        if isinstance(other, LogExpr):
            self._check(other)
            return other
        return LogExpr.constant(self.s, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0) + c
        return LogExpr(self.s, acc)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "LogExpr":
        c = Fraction(c)
        return LogExpr(self.s, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, LogExpr):
            return self.scale(other)
        self._check(other)
        acc: Dict[Term, Fraction] = {}
        for (m1, b1), c1 in self.terms.items():
            for (m2, b2), c2 in other.terms.items():
                k = (m1 + m2, b1 + b2)
                acc[k] = acc.get(k, 0) + c1 * c2
        return LogExpr(self.s, acc)

    __rmul__ = __mul__

    def shift(self, dm: int) -> "LogExpr":
        """Multiply by w**(dm/s)."""
        return LogExpr(self.s, {(m + dm, b): c for (m, b), c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, LogExpr):
            return self.s == other.s and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == LogExpr.constant(self.s, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.s, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"LogExpr(s={self.s}, {self.to_text()})"

    # calculus -------------------------------------------------------------

    def differentiate(self) -> "LogExpr":
        s = self.s
        acc: Dict[Term, Fraction] = {}
        for (m, b), c in self.terms.items():
            if m:
                k = (m - s, b)
                acc[k] = acc.get(k, 0) - m * c
            if b:
                k = (m - s, b - 1)
                acc[k] = acc.get(k, 0) - s * b * c
        return LogExpr(s, acc)

    def eval_origin(self) -> Fraction:
        return sum((c for (m, b), c in self.terms.items() if b == 0), Fraction(0))

    def antiderivative(self) -> "LogExpr":
        """The antiderivative vanishing at z = 0."""
        s = self.s
        acc: Dict[Term, Fraction] = {}

        def add(key, c):
            acc[key] = acc.get(key, 0) + c

        for (m, b), c in self.terms.items():
            if m == -s:
                add((0, b + 1), -c / (s * (b + 1)))
                continue
            # integrate by parts down to ln**0; each step peels one log
            coef = c
            for bb in range(b, -1, -1):
                add((m + s, bb), -coef / (m + s))
                coef = -coef * bb * s / (m + s)
        out = LogExpr(s, acc)
        return out - out.eval_origin()

    def integrate(self, times: int) -> "LogExpr":
        out = self
        for _ in range(times):
            out = out.antiderivative()
        return out

    # coefficients ---------------------------------------------------------

    def taylor_scaled(self) -> Iterator[Tuple[int, int]]:
        """Yield unreduced (numerator, denominator) of [z^n] for n = 0, 1, ...

        The derivatives are tracked with integer coefficients over one shared
        denominator, so no gcd is ever taken.
        """
        s = self.s
        den0 = math.lcm(*(c.denominator for c in self.terms.values())) if self.terms else 1
        cur = {k: int(c * den0) for k, c in self.terms.items()}
        den = den0
        n = 0
        while True:
            yield sum(c for (m, b), c in cur.items() if b == 0), den
            nxt: Dict[Term, int] = {}
            for (m, b), c in cur.items():
                if m:
                    k = (m - s, b)
                    nxt[k] = nxt.get(k, 0) - m * c
                if b:
                    k = (m - s, b - 1)
                    nxt[k] = nxt.get(k, 0) - s * b * c
            cur = {k: c for k, c in nxt.items() if c}
            n += 1
            den *= n

    def taylor(self, N: int) -> List[Fraction]:
        """[z^0], ..., [z^N]."""
        out = []
        for n, (num, den) in enumerate(self.taylor_scaled()):
            if n > N:
                break
            out.append(Fraction(num, den))
        return out

    def coefficient(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("n must be nonnegative")
        return self.taylor(n)[n]

    # numerics -------------------------------------------------------------

    def evaluate(self, z, dps: int = 50):
        import mpmath

        with mpmath.workdps(dps):
            w = 1 - self.s * mpmath.mpf(Fraction(z).numerator) / Fraction(z).denominator
            if w <= 0 and any(b or m % self.s for m, b in self.terms):
                raise DomainError(f"1 - {self.s}z = {w} is not positive")
            total = mpmath.mpf(0)
            for (m, b), c in self.terms.items():
                term = mpmath.mpf(c.numerator) / c.denominator
                if m:
                    term *= w ** (mpmath.mpf(m) / self.s)
                if b:
                    term *= mpmath.log(w) ** b
                total += term
            return +total

    # serialization --------------------------------------------------------

    def sorted_terms(self) -> List[Tuple[int, int, Fraction]]:
        """Terms by descending w power, then descending log power."""
        return [(m, b, self.terms[(m, b)]) for m, b in sorted(self.terms, key=lambda k: (-k[0], -k[1]))]

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "terms": [{"m": m, "b": b, "c": _frac_str(c)} for m, b, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LogExpr":
        return cls(int(data["s"]), {(int(t["m"]), int(t["b"])): Fraction(t["c"]) for t in data["terms"]})

    def to_text(self, base: str | None = None) -> str:
        base = base or f"(1-{self.s}z)"
        return render_terms(
            [(c, power_factor(m, self.s, base, False), log_factor(b, base, False)) for m, b, c in self.sorted_terms()],
            latex=False,
        )

    def to_latex(self, base: str | None = None) -> str:
        base = base or f"(1-{self.s}z)"
        return render_terms(
            [(c, power_factor(m, self.s, base, True), log_factor(b, base, True)) for m, b, c in self.sorted_terms()],
            latex=True,
        )


def root_insertion_closure(A: LogExpr) -> LogExpr:
    """w**(1/s) * integral_0^z w**(-(s+1)/s) A'(t) dt."""
    s = A.s
    return A.differentiate().shift(-(s + 1)).antiderivative().shift(1)


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def power_factor(m: int, s: int, base: str, latex: bool) -> str:
    """Render base**(m/s), using square roots where the exponent is a half."""
    if m == 0:
        return ""
    q = Fraction(m, s)
    inner = base[1:-1] if base.startswith("(") and base.endswith(")") else base
    if latex:
        if q.denominator == 2:
            root = f"\\sqrt{{{inner}}}"
            whole = abs(q) - Fraction(1, 2)
            pieces = root if whole == 0 else f"{base}^{{{whole}}}{root}"
            return pieces if q > 0 else f"\\frac{{1}}{{{pieces}}}"
        if q == 1:
            return base
        exp = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        return f"{base}^{{{exp}}}"
    if q == 1:
        return base
    if q.denominator == 1:
        return f"{base}^{q.numerator}"
    return f"{base}^({q.numerator}/{q.denominator})"


def log_factor(b: int, base: str, latex: bool) -> str:
    if b == 0:
        return ""
    inner = base if base.startswith("(") else f"({base})"
    if latex:
        return f"\\ln{inner}" if b == 1 else f"\\ln^{{{b}}}{inner}"
    return f"ln{inner}" if b == 1 else f"ln{inner}^{b}"


def render_terms(items, latex: bool) -> str:
    """items: (rational or preformatted-coefficient, factor, factor)."""
    if not items:
        return "0"
    out = ""
    for idx, (c, *factors) in enumerate(items):
        factors = [f for f in factors if f]
        body_f = ("" if latex else "*").join(factors)
        neg = c < 0
        mag = abs(c)
        if body_f and mag == 1:
            body = body_f
        elif body_f:
            if latex:
                cf = _latex_frac(mag)
                body = f"{cf}{body_f}"
            else:
                body = f"{_frac_str(mag)}*{body_f}"
        else:
            body = _latex_frac(mag) if latex else _frac_str(mag)
        if idx == 0:
            out = ("-" if neg else "") + body
        else:
            out += ("-" if neg else "+") + body if latex else (" - " if neg else " + ") + body
    return out


def _latex_frac(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"\\frac{{{c.numerator}}}{{{c.denominator}}}"
