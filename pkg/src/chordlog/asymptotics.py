"""Singularity analysis at z = 1/s and empirical convergence checks.

With L = ln(1/(1 - s z)) the transfer theorem gives, for alpha not in
{0, 1, 2, ...},

    [z^n] (1 - s z)^alpha ln(1 - s z)^b ~ (-1)^b s^n n^(-alpha-1) ln(n)^b / Gamma(-alpha)

and for alpha = m in {0, 1, ...} with b >= 1 the 1/Gamma pole cancels and

    [z^n] (1 - s z)^m ln(1 - s z)^b ~ (-1)^b s^n (-1)^m b m! n^(-m-1) ln(n)^(b-1).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import mpmath

from .diagrams import DiagramType
from .expansions import SCHEMA, prefactor
from .symexpr import LogExpr
from .typegf import F_of_type, enumerate_types


class PurelyPolynomial(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


@dataclass(frozen=True)
class SingularTerm:
    alpha: Fraction
    b: int
    c: Fraction


@dataclass(frozen=True)
class AsymptoticEstimate:
    """constant * base^n * n^power * ln(n)^logpower."""

    constant: mpmath.mpf
    base: Fraction
    power: Fraction
    logpower: int

    def value(self, n: int):
        n_mp = mpmath.mpf(n)
        base = mpmath.mpf(self.base.numerator) / self.base.denominator
        out = self.constant * base ** n * n_mp ** (mpmath.mpf(self.power.numerator) / self.power.denominator)
        if self.logpower:
            out *= mpmath.log(n_mp) ** self.logpower
        return out

    def __str__(self):
        parts = [mpmath.nstr(self.constant, 15)]
        if self.logpower:
            parts.append(f"ln(n)^{self.logpower}")
        parts.append(f"n^({self.power})")
        parts.append(f"({self.base})^n")
        return "*".join(parts)


def leading_singular_term(F: LogExpr) -> SingularTerm:
    s = F.s
    best = None
    for (m, b), c in F.terms.items():
        alpha = Fraction(m, s)
        analytic = b == 0 and alpha.denominator == 1 and alpha >= 0
        if analytic:
            continue
        rank = (alpha, -b)
        if best is None or rank < best[0]:
            best = (rank, SingularTerm(alpha, b, c))
    if best is None:
        raise PurelyPolynomial("no singular term: the function is a polynomial")
    return best[1]


def transfer_estimate(term: SingularTerm, s: int) -> AsymptoticEstimate:
    """Coefficient asymptotics of a single basis term c (1-sz)^alpha ln(1-sz)^b."""
    sign = (-1) ** term.b
    c = mpmath.mpf(term.c.numerator) / term.c.denominator
    alpha = term.alpha
    if alpha.denominator == 1 and alpha >= 0:
        m = int(alpha)
        const = c * sign * (-1) ** m * term.b * math.factorial(m)
        return AsymptoticEstimate(const, Fraction(s), -alpha - 1, term.b - 1)
    a = mpmath.mpf(alpha.numerator) / alpha.denominator
    const = c * sign / mpmath.gamma(-a)
    return AsymptoticEstimate(const, Fraction(s), -alpha - 1, term.b)


def dominant_types(k: int, s: int) -> List[DiagramType]:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if s == 1:
        if k == 0:
            raise ValueError("no dominant type is defined for s=1, k=0")
        return [DiagramType(2, (), (2,) * (k - 1))]
    return [DiagramType(1, ((1, 1),) * k1, (2,) * (k - k1)) for k1 in range(k, -1, -1)]


def _dominant_shape(T: DiagramType, s: int) -> Optional[Tuple[int, int]]:
    if s == 1:
        if T.delta == 2 and not T.gaps and set(T.nonterminals) <= {2}:
            return 0, len(T.nonterminals)
        return None
    if T.delta == 1 and set(T.gaps) <= {(1, 1)} and set(T.nonterminals) <= {2}:
        return len(T.gaps), len(T.nonterminals)
    return None


def coefficient_estimate(T: DiagramType, s: int) -> AsymptoticEstimate:
    """Asymptotic form of [z^n] F_T for a dominant type."""
    shape = _dominant_shape(T, s)
    if shape is None:
        raise ValueError(f"{T} is not a dominant type for s={s}")
    k1, k2 = shape
    if s == 1:
        k = k2 + 1
        return AsymptoticEstimate(mpmath.mpf(1) / math.factorial(k - 1), Fraction(1), Fraction(-2), k - 1)
    k = k1 + k2
    const = mpmath.mpf((s - 1) ** k1 * math.comb(k, k1)) / (mpmath.gamma(1 - mpmath.mpf(1) / s) * math.factorial(k))
    const /= mpmath.mpf(s) ** (k + 1)
    return AsymptoticEstimate(const, Fraction(s), Fraction(-1, s) - 1, k)


def _aval(avals, i, j) -> Fraction:
    return Fraction(avals.get((i, j), 0))


def check_hypotheses(s: int, avals: Mapping[Tuple[int, int], Fraction]):
    a10, a11, a20 = _aval(avals, 1, 0), _aval(avals, 1, 1), _aval(avals, 2, 0)
    if a10 == 0:
        raise HypothesisViolated("a[1,0] must be nonzero")
    if s == 1 and a20 == 0:
        raise HypothesisViolated("a[2,0] must be nonzero for s=1")
    if s >= 2 and a20 + (s - 1) * a11 * a10 == 0:
        raise HypothesisViolated("a[2,0] + (s-1) a[1,1] a[1,0] must be nonzero")


def hk_estimate(k: int, s: int, avals: Mapping[Tuple[int, int], Fraction]) -> AsymptoticEstimate:
    """Asymptotic form of [z^n] H_k.

    The sign is carried from H_k = kappa - sum prefactor * F^{(k)}(-a10 z),
    which gives the alternating factor (-1)^(n+1).
    """
    check_hypotheses(s, avals)
    a10, a11, a20 = _aval(avals, 1, 0), _aval(avals, 1, 1), _aval(avals, 2, 0)
    if s == 1:
        if k < 1:
            raise ValueError("the s=1 estimate needs k >= 1")
        mag = a20 ** k / a10 ** k
        const = -mpmath.mpf(mag.numerator) / mag.denominator / math.factorial(k - 1)
        return AsymptoticEstimate(const, -a10, Fraction(k - 2), k - 1)
    mag = (a20 + (s - 1) * a11 * a10) ** k / a10 ** k
    const = -mpmath.mpf(mag.numerator) / mag.denominator
    const /= mpmath.gamma(1 - mpmath.mpf(1) / s) * math.factorial(k) * s
    return AsymptoticEstimate(const, -s * a10, Fraction(k) - Fraction(1, s) - 1, k)


def hk_weighted_gf(k: int, s: int, avals: Mapping[Tuple[int, int], Fraction]) -> LogExpr:
    """sum_T prefactor_T(a) F_T, so that [z^n] H_k = -(-a10)^n (n+k)!/n! [z^(n+k)] of it."""
    total = LogExpr(s)
    for T in enumerate_types(k):
        pre = prefactor(T, k)
        value = pre.coeff
        for i, j, p in pre.factors:
            value *= _aval(avals, i, j) ** p
        if value:
            total = total + F_of_type(T, s).F.scale(value)
    return total


def hk_coefficients(k: int, s: int, avals: Mapping[Tuple[int, int], Fraction]) -> Iterator[Tuple[int, int, int]]:
    """Yield (n, numerator, denominator) of [z^n] H_k for n = 1, 2, ... (unreduced, den > 0)."""
    a10 = _aval(avals, 1, 0)
    if a10 == 0:
        raise HypothesisViolated("a[1,0] must be nonzero")
    p, q = a10.numerator, a10.denominator
    G = hk_weighted_gf(k, s, avals)
    stream = G.taylor_scaled()
    first_num, den0 = next(stream)  # den0 = D0 * 0!
    for _ in range(k):
        next(stream)
    pow_p, pow_q, fact = 1, 1, 1
    for n, (num, _) in enumerate(stream, start=1):
        pow_p *= -p
        pow_q *= q
        fact *= n
        # num is the numerator of [z^(n+k)] G over den0 * (n+k)!
        yield n, -pow_p * num, pow_q * den0 * fact


def _to_mpf(num: int, den: int):
    return mpmath.mpf(num) / den


@dataclass
class ReportRow:
    n: int
    exact: Fraction
    estimate: mpmath.mpf
    ratio: mpmath.mpf
    neighbor_ratio: Optional[mpmath.mpf]


def _default_points(n_max: int) -> List[int]:
    pts = set()
    p = 10
    while p <= n_max:
        pts.update({p, 2 * p, 5 * p})
        p *= 10
    pts.add(n_max)
    return sorted(x for x in pts if x <= n_max)


def convergence_report(
    k: int,
    s: int,
    n_max: int,
    avals: Mapping[Tuple[int, int], Fraction],
    points: Optional[Sequence[int]] = None,
    dps: int = 30,
) -> Dict:
    if n_max < 10:
        raise ValueError("n_max must be at least 10")
    est = hk_estimate(k, s, avals)
    wanted = set(points or _default_points(n_max))
    rows: List[ReportRow] = []
    limit = -s * _aval(avals, 1, 0)
    prev = None
    with mpmath.workdps(dps):
        for n, num, den in hk_coefficients(k, s, avals):
            if prev is not None and prev[0] in wanted:
                pn, pnum, pden = prev
                exact = Fraction(pnum, pden)
                e = est.value(pn)
                nb = (_to_mpf(num, den) / _to_mpf(pnum, pden)) if pnum else None
                rows.append(ReportRow(pn, exact, e, _to_mpf(pnum, pden) / e, nb))
            if n > n_max:
                break
            prev = (n, num, den)
    return {
        "schema": SCHEMA,
        "k": k,
        "s": s,
        "estimate": str(est),
        "neighbor_limit": str(limit),
        "rows": rows,
    }


def report_to_csv(report: Dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "exact", "estimate", "ratio", "neighbor_ratio"])
    for r in report["rows"]:
        writer.writerow([
            r.n,
            f"{r.exact.numerator}/{r.exact.denominator}",
            mpmath.nstr(r.estimate, 20),
            mpmath.nstr(r.ratio, 20),
            mpmath.nstr(r.neighbor_ratio, 20) if r.neighbor_ratio is not None else "",
        ])
    return buf.getvalue()


def report_to_json(report: Dict) -> dict:
    return {
        "schema": report["schema"],
        "k": report["k"],
        "s": report["s"],
        "estimate": report["estimate"],
        "neighbor_limit": report["neighbor_limit"],
        "rows": [
            {
                "n": r.n,
                "exact": f"{r.exact.numerator}/{r.exact.denominator}",
                "estimate": mpmath.nstr(r.estimate, 20),
                "ratio": mpmath.nstr(r.ratio, 20),
                "neighbor_ratio": mpmath.nstr(r.neighbor_ratio, 20) if r.neighbor_ratio is not None else None,
            }
            for r in report["rows"]
        ],
    }
