"""N^kLL expansions H_k(z), the truncated Green function and P(x).

Sign convention: G(x, L) = 1 - sum_C (sum_i a[d(t1), t1-i] (-L)^i / i!) w(C) A(C) x^|C|,
and H_k collects the terms x^k (xL)^n.  The closed form is

    H_k(z) = kappa - sum_T prefactor(T) * F_T^{(k)}(-a[1,0] z)

with kappa chosen so that H_k(0) = 0.  Under z -> -a[1,0] z the basis
variable w = 1 - s z becomes u = 1 + s a[1,0] z, so closed forms are kept in
the w-basis and only relabelled when rendered or evaluated.
"""
from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from .apoly import AMonomial, APolynomial, Key, UnassignedSymbol, format_monomial, key_mul, _frac_str
from .diagrams import (
    DiagramType,
    _omega,
    a_monomial_from_profile,
    compositions,
    flat_to_order,
    iter_connected_flat,
    weight_from_profile,
)
from .symexpr import DomainError, LogExpr, log_factor, power_factor
from .typegf import F_of_type, enumerate_types

SCHEMA = "chordlog/1"


def prefactor(T: DiagramType, k: int) -> AMonomial:
    """a10^(k-delta) a[delta,k-t] prod_D a[d,0]/a10^d prod_G a[d,g]/a10^d."""
    counts: Dict[Tuple[int, int], int] = defaultdict(int)
    counts[(1, 0)] += k - T.delta
    counts[(T.delta, k - T.t)] += 1
    for d in T.nonterminals:
        counts[(d, 0)] += 1
        counts[(1, 0)] -= d
    for d, g in T.gaps:
        counts[(d, g)] += 1
        counts[(1, 0)] -= d
    return AMonomial.from_counts(counts)


@dataclass(frozen=True)
class HkTerm:
    prefactor: AMonomial
    type: DiagramType
    F: LogExpr

    def to_json(self) -> dict:
        return {"prefactor": self.prefactor.to_json(), "type": self.type.to_json(), "F": self.F.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "HkTerm":
        return cls(
            AMonomial.from_json(data["prefactor"]),
            DiagramType.from_json(data["type"]),
            LogExpr.from_json(data["F"]),
        )


@dataclass(frozen=True)
class HkClosedForm:
    k: int
    s: int
    kappa: APolynomial
    terms: Tuple[HkTerm, ...]

    def normal_form(self) -> Dict[Tuple[int, int], APolynomial]:
        """(m, b) -> coefficient of u^(m/s) ln(u)^b, u = 1 + s a[1,0] z."""
        acc: Dict[Tuple[int, int], APolynomial] = {}
        if self.kappa:
            acc[(0, 0)] = self.kappa
        for term in self.terms:
            dF = _derivative(term.F, self.k)
            for key, c in dF.terms.items():
                contrib = APolynomial.from_monomial(term.prefactor * (-c))
                acc[key] = acc[key] + contrib if key in acc else contrib
        return {key: v for key, v in acc.items() if v}

    def __eq__(self, other):
        if not isinstance(other, HkClosedForm):
            return NotImplemented
        return (
            (self.k, self.s) == (other.k, other.s)
            and self.kappa == other.kappa
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.k, self.s, len(self.terms)))

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "k": self.k,
            "s": self.s,
            "kappa": self.kappa.to_json(),
            "terms": [t.to_json() for t in self.terms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HkClosedForm":
        return cls(
            int(data["k"]),
            int(data["s"]),
            APolynomial.from_json(data["kappa"]),
            tuple(HkTerm.from_json(t) for t in data["terms"]),
        )

    def to_latex(self) -> str:
        return render_normal_form(self.normal_form(), self.s, latex=True)

    def to_text(self) -> str:
        return render_normal_form(self.normal_form(), self.s, latex=False)

    def evaluate(self, avals: Mapping[Tuple[int, int], Fraction], z, dps: int = 50):
        return evaluate(self, avals, z, dps=dps)


def _derivative(F: LogExpr, k: int) -> LogExpr:
    for _ in range(k):
        F = F.differentiate()
    return F


def hk_closed_form(k: int, s: int) -> HkClosedForm:
    if k < 0 or s < 1:
        raise ValueError("need k >= 0 and s >= 1")
    terms = []
    kappa = APolynomial()
    for T in enumerate_types(k):
        F = F_of_type(T, s).F
        pre = prefactor(T, k)
        terms.append(HkTerm(pre, T, F))
        kappa = kappa + APolynomial.from_monomial(pre * _derivative(F, k).eval_origin())
    return HkClosedForm(k, s, kappa, tuple(terms))


def hk_series(k: int, s: int, N: int) -> List[APolynomial]:
    """Coefficients of z^1..z^N of H_k."""
    out = [APolynomial() for _ in range(N)]
    for T in enumerate_types(k):
        taylor = F_of_type(T, s).F.taylor(N + k)
        pre = prefactor(T, k)
        for n in range(1, N + 1):
            f = taylor[n + k]
            if not f:
                continue
            scale = -f * math.perm(n + k, k) * (-1) ** n
            out[n - 1] = out[n - 1] + APolynomial.from_monomial(pre * AMonomial.symbol(1, 0, n) * scale)
    return out


# ---------------------------------------------------------------------------
# Diagram sums
# ---------------------------------------------------------------------------


def _profiles(max_size: int, part: int = 0, parts: int = 1):
    """(decorations, omega, terminals) of every decorated connected diagram up to max_size."""
    for n in range(1, max_size + 1):
        for flat, terms in iter_connected_flat(n, part, parts):
            omega = _omega(flat_to_order(flat))
            yield n, omega, terms


def _bruteforce_chunk(args):
    pairs, N, part, parts = args
    max_k = max(k for _, k in pairs)
    # (s, k, exponent) -> monomial key -> integer sum
    acc: Dict[Tuple[int, int, int], Dict[Key, int]] = defaultdict(lambda: defaultdict(int))
    for n, omega, terms in _profiles(N + max_k, part, parts):
        t1 = terms[0]
        for S in range(n, min(t1 + max_k, N + max_k) + 1):
            for decos in compositions(S, n):
                base = a_monomial_from_profile(decos, terms).factors
                delta = decos[t1 - 1]
                weights = {}
                for s, k in pairs:
                    if not (S - t1 <= k and k < S <= N + k):
                        continue
                    if s not in weights:
                        weights[s] = weight_from_profile(decos, omega, s)
                    w = weights[s]
                    if not w:
                        continue
                    key = key_mul(base, ((delta, t1 + k - S, 1),))
                    sign = -((-1) ** (S - k))
                    acc[(s, k, S - k)][key] += sign * w
    return {key: dict(v) for key, v in acc.items()}


def _merge_chunks(chunks) -> Dict[Tuple[int, int, int], Dict[Key, int]]:
    total: Dict[Tuple[int, int, int], Dict[Key, int]] = defaultdict(lambda: defaultdict(int))
    for chunk in chunks:
        for key, mono in chunk.items():
            for mk, v in mono.items():
                total[key][mk] += v
    return total


def _run_chunks(fn, args_for, threads: int):
    if threads <= 1:
        return [fn(args_for(0, 1))]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, [args_for(p, threads) for p in range(threads)]))


def hk_bruteforce_many(pairs: Sequence[Tuple[int, int]], N: int, threads: int = 1) -> Dict[Tuple[int, int], List[APolynomial]]:
    """hk_bruteforce for several (s, k) pairs sharing one enumeration pass."""
    pairs = sorted(set(pairs))
    chunks = _run_chunks(_bruteforce_chunk, lambda p, P: (pairs, N, p, P), threads)
    total = _merge_chunks(chunks)
    out = {}
    for s, k in pairs:
        series = []
        for e in range(1, N + 1):
            mono = total.get((s, k, e), {})
            fact = math.factorial(e)
            series.append(APolynomial({mk: Fraction(v, fact) for mk, v in mono.items()}))
        out[(s, k)] = series
    return out


def hk_bruteforce(k: int, s: int, N: int, threads: int = 1) -> List[APolynomial]:
    """H_k coefficients of z^1..z^N summed directly over diagrams."""
    return hk_bruteforce_many([(s, k)], N, threads)[(s, k)]


@dataclass
class BivariateSeries:
    """g[i][j]: coefficient of L^i x^j, 0 <= i <= j <= N."""

    N: int
    g: List[List[APolynomial]]

    def coefficient(self, i: int, j: int) -> APolynomial:
        return self.g[i][j]

    def diagonal(self, k: int) -> List[APolynomial]:
        """Coefficients of z^1..z^(N-k) of H_k."""
        return [self.g[n][n + k] for n in range(1, self.N - k + 1)]

    def gamma(self, i: int) -> List[APolynomial]:
        """gamma_i(x) coefficients of x^1..x^N, with G = 1 - sum gamma_i L^i."""
        return [-self.g[i][j] if i <= self.N else APolynomial() for j in range(1, self.N + 1)]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "N": self.N,
            "g": [
                {"i": i, "j": j, "coeff": self.g[i][j].to_json()}
                for j in range(self.N + 1)
                for i in range(j + 1)
                if self.g[i][j]
            ],
        }


def green_contribution(decorations: Sequence[int], terminals: Sequence[int], w: int) -> Dict[int, APolynomial]:
    """L-power -> coefficient contributed by one decorated diagram (times x^size)."""
    base = a_monomial_from_profile(decorations, terminals)
    t1 = terminals[0]
    delta = decorations[t1 - 1]
    return {
        i: APolynomial.from_monomial(
            base * AMonomial.symbol(delta, t1 - i) * Fraction(-((-1) ** i) * w, math.factorial(i))
        )
        for i in range(1, t1 + 1)
    }


def _green_chunk(args):
    s, N, part, parts = args
    acc: Dict[Tuple[int, int], Dict[Key, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for n, omega, terms in _profiles(N, part, parts):
        for S in range(n, N + 1):
            for decos in compositions(S, n):
                w = weight_from_profile(decos, omega, s)
                if not w:
                    continue
                for i, poly in green_contribution(decos, terms, w).items():
                    for key, c in poly.terms.items():
                        acc[(i, S)][key] += c
    return {k: dict(v) for k, v in acc.items()}


def green_series(s: int, N: int, threads: int = 1) -> BivariateSeries:
    chunks = _run_chunks(_green_chunk, lambda p, P: (s, N, p, P), threads)
    g = [[APolynomial() for _ in range(N + 1)] for _ in range(N + 1)]
    g[0][0] = APolynomial.constant(1)
    total: Dict[Tuple[int, int], Dict[Key, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for chunk in chunks:
        for key, mono in chunk.items():
            for mk, v in mono.items():
                total[key][mk] += v
    for (i, j), mono in total.items():
        g[i][j] = APolynomial(mono)
    return BivariateSeries(N, g)


def _p_chunk(args):
    s, N, part, parts = args
    acc: Dict[int, Dict[Key, int]] = defaultdict(lambda: defaultdict(int))
    for n, omega, terms in _profiles(N, part, parts):
        t1 = terms[0]
        for S in range(n, N + 1):
            for decos in compositions(S, n):
                w = weight_from_profile(decos, omega, s)
                if not w:
                    continue
                base = a_monomial_from_profile(decos, terms).factors
                delta = decos[t1 - 1]
                acc[S][key_mul(base, ((delta, t1 - 1, 1),))] += w
                if t1 >= 2:
                    acc[S][key_mul(base, ((delta, t1 - 2, 1),))] -= w
    return {k: dict(v) for k, v in acc.items()}


def p_series(s: int, N: int, threads: int = 1) -> List[APolynomial]:
    """sum over marked diagrams of (a[d(t1),t1-1] - a[d(t1),t1-2]) A(C) x^|C|.

    Summing over marked diagrams weights each decorated diagram by w(C).
    """
    if N < 1:
        return []
    chunks = _run_chunks(_p_chunk, lambda p, P: (s, N, p, P), threads)
    total: Dict[int, Dict[Key, int]] = defaultdict(lambda: defaultdict(int))
    for chunk in chunks:
        for S, mono in chunk.items():
            for mk, v in mono.items():
                total[S][mk] += v
    return [APolynomial(dict(total.get(S, {}))) for S in range(1, N + 1)]


def p_from_green(series: BivariateSeries) -> List[APolynomial]:
    """gamma_1 + 2 gamma_2 read off the Green function."""
    g1 = series.gamma(1)
    g2 = series.gamma(2) if series.N >= 2 else [APolynomial()] * series.N
    return [a + b * 2 for a, b in zip(g1, g2)]


# ---------------------------------------------------------------------------
# Evaluation and rendering
# ---------------------------------------------------------------------------


def evaluate(expr, avals: Mapping[Tuple[int, int], Fraction], z=None, dps: int = 50):
    """Exact value of an APolynomial, or a high-precision real for H_k at z."""
    if isinstance(expr, APolynomial):
        return expr.evaluate(avals)
    if isinstance(expr, BivariateSeries):
        x, L = z
        x, L = Fraction(x), Fraction(L)
        return sum(
            (expr.g[i][j].evaluate(avals) * L ** i * x ** j for j in range(expr.N + 1) for i in range(j + 1)),
            Fraction(0),
        )
    import mpmath

    nf = expr.normal_form()
    a10 = Fraction(avals[(1, 0)]) if (1, 0) in avals else None
    if a10 is None:
        raise UnassignedSymbol("a[1,0] has no value")
    u = 1 + expr.s * a10 * Fraction(z)
    needs_log_or_root = any(b or m % expr.s for m, b in nf)
    if u <= 0 and needs_log_or_root:
        raise DomainError(f"1 + s*a[1,0]*z = {u} is not positive")
    if u == 0 and any(m < 0 for m, _ in nf):
        raise DomainError("negative power of zero")
    with mpmath.workdps(dps):
        um = mpmath.mpf(u.numerator) / u.denominator
        total = mpmath.mpf(0)
        for (m, b), coeff in nf.items():
            c = coeff.evaluate(avals)
            term = mpmath.mpf(c.numerator) / c.denominator
            if m:
                term *= um ** (mpmath.mpf(m) / expr.s)
            if b:
                term *= mpmath.log(um) ** b
            total += term
        return +total


def u_base(s: int, latex: bool) -> str:
    if latex:
        return f"(1+{s if s != 1 else ''}a_{{1,0}}z)"
    return f"(1+{s if s != 1 else ''}{'*' if s != 1 else ''}a[1,0]*z)"


def _coeff_str(p: APolynomial, latex: bool) -> Tuple[bool, str]:
    """(negative, magnitude text) for a coefficient; multi-term sums are parenthesized."""
    monos = p.monomials()
    if len(monos) == 1:
        m = monos[0]
        neg = m.coeff < 0
        mag = abs(m.coeff)
        sym = format_monomial(m.factors, latex)
        if not sym:
            return neg, _num(mag, latex)
        if mag == 1:
            return neg, sym
        return neg, (_num(mag, latex) + sym) if latex else f"{_frac_str(mag)}*{sym}"
    parts = []
    for idx, m in enumerate(monos):
        sym = format_monomial(m.factors, latex)
        mag = abs(m.coeff)
        if not sym:
            body = _num(mag, latex)
        elif mag == 1:
            body = sym
        else:
            body = (_num(mag, latex) + sym) if latex else f"{_frac_str(mag)}*{sym}"
        sign = "-" if m.coeff < 0 else "+"
        if idx == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append((sign if latex else f" {sign} ") + body)
    return False, "(" + "".join(parts) + ")"


def _num(c: Fraction, latex: bool) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"\\frac{{{c.numerator}}}{{{c.denominator}}}" if latex else _frac_str(c)


def render_normal_form(nf: Mapping[Tuple[int, int], APolynomial], s: int, latex: bool) -> str:
    if not nf:
        return "0"
    base = u_base(s, latex)
    out = ""
    for idx, key in enumerate(sorted(nf, key=lambda k: (-k[0], -k[1]))):
        m, b = key
        neg, coeff = _coeff_str(nf[key], latex)
        factors = [f for f in (power_factor(m, s, base, latex), log_factor(b, base, latex)) if f]
        joiner = "" if latex else "*"
        if factors and coeff == "1":
            body = joiner.join(factors)
        elif factors:
            body = coeff + joiner + joiner.join(factors)
        else:
            body = coeff
        if idx == 0:
            out = ("-" if neg else "") + body
        elif latex:
            out += ("-" if neg else "+") + body
        else:
            out += (" - " if neg else " + ") + body
    return out
