from collections import defaultdict
from fractions import Fraction as Fr

import pytest

from chordlog.diagrams import DiagramType, diagram_type, enumerate_decorated, weight
from chordlog.symexpr import LogExpr, root_insertion_closure
from chordlog.typegf import F_of_type, clear_cache, enumerate_types, t_value


def T(delta, gaps=(), nonterminals=()):
    return DiagramType(delta, tuple(gaps), tuple(nonterminals))


def s2(const=0, zc=0, **terms):
    """s = 2 closed form: const + zc*z + sum c * w^(m/2) ln(w)^b, keys 'm_b'."""
    out = LogExpr.from_z_polynomial([const, zc], 2)
    for key, c in terms.items():
        m, b = (int(x) for x in key[1:].split("_"))
        out = out + LogExpr.basis(2, m, b, c)
    return out


def test_t_value():
    assert t_value(T(1)) == 0
    assert t_value(T(1, [(1, 1)])) == 1
    assert t_value(T(2, [(1, 2), (2, 1)], [3])) == 7


def test_enumerate_types_small():
    assert enumerate_types(0) == [T(1)]
    assert set(enumerate_types(1)) == {T(1), T(2), T(1, [(1, 1)]), T(1, (), [2])}
    assert len(enumerate_types(1)) == 4
    two = enumerate_types(2)
    assert len(two) == 13
    assert {x for x in two if x.t == 2} == set(TABLE1)


def test_enumerate_types_sorted_and_unique():
    for k in range(5):
        types = enumerate_types(k)
        assert len(types) == len(set(types))
        assert all(x.t <= k for x in types)
        assert [x.t for x in types] == sorted(x.t for x in types)
        assert set(enumerate_types(k - 1)) <= set(types)


def test_enumerate_types_negative():
    assert enumerate_types(-1) == []


@pytest.mark.parametrize("s", [1, 2, 3, 5])
def test_F_single_chord(s):
    assert F_of_type(T(1), s).F == 1 - LogExpr.basis(s, 1)


def test_F_two_chord_s2():
    assert F_of_type(T(2), 2).F == s2(1, -1, w1_0=-1)


NTLL_S2 = s2(0, 1, w1_1=Fr(1, 2))


def test_F_ntll_s2():
    assert F_of_type(T(1, [(1, 1)]), 2).F == NTLL_S2
    assert F_of_type(T(1, (), [2]), 2).F == NTLL_S2


@pytest.mark.parametrize("s", [2, 3, 4])
def test_F_one_nonterminal_general_s(s):
    # (s(s+z-2) + w^(1/s)((s-1) ln w - (s-2)s)) / (s(s-1))
    num = LogExpr.from_z_polynomial([s * (s - 2), s], s)
    num = num + LogExpr.basis(s, 1, 1, s - 1) + LogExpr.basis(s, 1, 0, -(s - 2) * s)
    assert F_of_type(T(1, (), [2]), s).F == num.scale(Fr(1, s * (s - 1)))


# generating functions of the nine t = 2 types at s = 2
_sym_delta2 = s2(Fr(-3, 8), Fr(3, 2), w1_0=Fr(1, 3), w1_1=Fr(1, 2), w4_0=Fr(1, 24))
_sym_gap = s2(Fr(7, 8), Fr(-3, 2), w4_0=Fr(1, 8), w3_0=Fr(-1, 2), w1_0=Fr(-1, 2))
TABLE1 = {
    T(1, (), [2, 2]): s2(Fr(17, 24), Fr(-1, 2), w1_2=Fr(-1, 8), w1_0=Fr(-5, 6), w3_0=Fr(1, 6), w4_0=Fr(-1, 24)),
    T(1, [(1, 1)], [2]): s2(Fr(41, 24), Fr(-3, 2), w1_2=Fr(-1, 4), w1_0=Fr(-11, 6), w3_0=Fr(1, 6), w4_0=Fr(-1, 24)),
    T(1, [(1, 1), (1, 1)]): s2(1, -1, w1_2=Fr(-1, 8), w1_0=-1),
    T(2, (), [2]): _sym_delta2,
    T(2, [(1, 1)]): _sym_delta2,
    T(1, [(2, 1)]): _sym_gap,
    T(1, [(1, 2)]): _sym_gap,
    T(1, (), [3]): s2(Fr(7, 24), Fr(-1, 2), w4_0=Fr(1, 24), w3_0=Fr(-1, 6), w1_0=Fr(-1, 6)),
    T(3): s2(Fr(3, 8), Fr(-1, 2), w4_0=Fr(-1, 24), w1_0=Fr(-1, 3)),
}


@pytest.mark.parametrize("typ", list(TABLE1), ids=str)
def test_table1(typ):
    assert F_of_type(typ, 2).F == TABLE1[typ]


def test_fourteen_term_example():
    coeffs = {
        16: Fr(1, 78274560), 14: Fr(-1, 3311616), 12: Fr(1, 168960), 11: Fr(-1, 55440),
        10: Fr(1, 129024), 9: Fr(1, 14112), 8: Fr(-17, 86016), 7: Fr(1, 3920),
        6: Fr(-1, 6144), 4: Fr(1, 10752), 3: Fr(-1, 12012), 2: Fr(169, 4515840),
        1: Fr(-1, 110880), 0: Fr(37, 39739392),
    }
    F = F_of_type(T(3, [(2, 1), (2, 1)], [4]), 2).F
    assert F == LogExpr(2, {(m, 0): c for m, c in coeffs.items()})
    assert len(F.terms) == 14


@pytest.fixture(scope="module")
def oracle():
    """(s, type, n) -> sum of weights over decorated diagrams of size n, for t <= 2."""
    totals = defaultdict(int)
    for n in range(1, 8):
        for C in enumerate_decorated(n):
            typ = diagram_type(C)
            if typ.t > 2:
                continue
            for s in (1, 2, 3):
                totals[(s, typ, n)] += weight(C, s)
    return totals


@pytest.mark.parametrize("s", [1, 2, 3])
def test_oracle_equivalence(oracle, s):
    for typ in enumerate_types(2):
        coeffs = F_of_type(typ, s).F.taylor(7)
        fact = 1
        for n in range(1, 8):
            fact *= n
            assert coeffs[n] * fact == oracle[(s, typ, n)], (s, str(typ), n)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_F_vanishes_at_origin_and_nonnegative(s):
    for typ in enumerate_types(3):
        entry = F_of_type(typ, s)
        coeffs = entry.F.taylor(12)
        assert coeffs[0] == 0
        assert all(c >= 0 for c in coeffs)


def test_first_nonzero_coefficient_at_minimal_size():
    # (delta,{},{}) starts at the lone root; anything else needs more chords
    for typ in enumerate_types(2):
        coeffs = F_of_type(typ, 2).F.taylor(7)
        first = next(n for n, c in enumerate(coeffs) if c)
        if not typ.gaps and not typ.nonterminals:
            assert first == typ.delta
        else:
            assert first > typ.delta


def test_entry_closure_and_json():
    for typ in enumerate_types(2):
        entry = F_of_type(typ, 3)
        assert entry.F == root_insertion_closure(entry.base_A)
    data = F_of_type(T(1, [(1, 1)]), 2).to_json()
    assert data["type"] == {"delta": 1, "gaps": [[1, 1]], "nonterminals": []}
    assert data["s"] == 2
    assert LogExpr.from_json(data["F"]) == NTLL_S2


@pytest.mark.parametrize("s", [1, 2, 3])
def test_cache_invisible(s):
    cached = {typ: F_of_type(typ, s).F for typ in enumerate_types(3)}
    clear_cache()
    for typ, F in cached.items():
        assert F_of_type(typ, s, cache=False).F.terms == F.terms
