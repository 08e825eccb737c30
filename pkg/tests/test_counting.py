"""Counting systems, tables, sections, and the brute-force oracle."""

from fractions import Fraction

import pytest

from orbitcount.automata import PreconditionError, orbitise
from orbitcount.counting import (AffineOperator, PolyK, build_counting_system,
                                 canonical_words, evaluate, evaluate_1d,
                                 oracle_count, oracle_table, pair_names,
                                 polyk_divmod, polyk_gcd, rgs_enumerate,
                                 section, stirling_system, system_from_json,
                                 system_to_json, table_to_csv)

from _helpers import load_fixture, random_polyk, seeded


# ---------------------------------------------------------------------------
# Polynomials in k
# ---------------------------------------------------------------------------

def test_polyk_basics():
    p = PolyK([1, 2])  # 1 + 2k
    assert p.eval_at(3) == 7
    assert p.shift(2) == PolyK([5, 2])
    assert (p * p).coeffs == (1, 4, 4)
    assert PolyK([0, 0]).is_zero()
    assert p.render() == "2*k + 1"


def test_polyk_divmod_identity():
    rng = seeded(11)
    for _ in range(300):
        a = random_polyk(rng, 4)
        b = random_polyk(rng, 2)
        if b.is_zero():
            continue
        q, r = polyk_divmod(a, b)
        assert q * b + r == a
        assert r.degree < b.degree


def test_polyk_gcd_divides():
    rng = seeded(12)
    for _ in range(200):
        a, b = random_polyk(rng, 3), random_polyk(rng, 3)
        g = polyk_gcd(a, b)
        if g.is_zero():
            assert a.is_zero() and b.is_zero()
            continue
        assert polyk_divmod(a, g)[1].is_zero()
        assert polyk_divmod(b, g)[1].is_zero()
        assert g.coeffs[-1] == 1


# ---------------------------------------------------------------------------
# Canonical words and restricted-growth strings
# ---------------------------------------------------------------------------

BELL = [1, 1, 2, 5, 15, 52, 203, 877]
STIRLING = {(0, 0): 1, (3, 2): 3, (4, 2): 7, (4, 3): 6, (5, 3): 25,
            (6, 3): 90, (7, 4): 350}


def test_canonical_word_counts():
    for n in range(6):
        assert sum(1 for _ in canonical_words(['a'], n)) == BELL[n]
        assert sum(1 for _ in canonical_words(['a', 'b'], n)) == BELL[n] * 2 ** n


def test_rgs_enumerate_counts():
    for (n, k), v in STIRLING.items():
        assert sum(1 for _ in rgs_enumerate(n, k)) == v


# ---------------------------------------------------------------------------
# The Stirling-like system
# ---------------------------------------------------------------------------

def test_stirling_table_values():
    table = evaluate(stirling_system(1), 7, 7)
    for (n, k), v in STIRLING.items():
        assert table.get('S', n, k) == v
    # row sums are Bell numbers
    for n in range(8):
        assert sum(table.get('S', n, k) for k in range(8)) == BELL[n]


def test_stirling_scaled_alphabet():
    table = evaluate(stirling_system(2), 5, 5)
    for n in range(6):
        # words over a 2-letter alphabet: Stirling * 2^n per width
        assert sum(table.get('S', n, k) for k in range(6)) == BELL[n] * 2 ** n


# ---------------------------------------------------------------------------
# Compiling automata
# ---------------------------------------------------------------------------

def test_counting_system_shape():
    cs = build_counting_system(orbitise(load_fixture('universal')))
    # one orbit per register state: bottom register and one stored atom
    assert cs.variables == ['G_p[1]', 'G_p[_]', 'S']
    assert cs.all_names() == ['G_p[1]', 'G_p[_]', 'S', 'G']
    assert cs.boundaries == {'G_p[1]': (0, 0, 0), 'G_p[_]': (1, 0, 0),
                             'S': (1, 0, 0)}
    assert cs.derived == [('G', {'S': Fraction(1), 'G_p[1]': Fraction(-1),
                                 'G_p[_]': Fraction(-1)})]


def test_two_register_equations():
    """Each fresh-input transition contributes 1*src(n,k) (globally fresh
    atom) plus (k+1-width(src))*src(n,k+1) (unstored old atoms); a
    stored-atom transition contributes src(n,k+1)."""
    cs = build_counting_system(orbitise(load_fixture('two-register')))
    i = {v: n for n, v in enumerate(cs.variables)}
    gp, gq, gr = i['G_p'], i['G_q'], i['G_r']
    one = PolyK.const(1)
    assert cs.matrix[gp][gp] == AffineOperator()
    assert cs.matrix[gq][gp] == AffineOperator(p00=one, p10=PolyK([1, 1]))
    assert cs.matrix[gq][gq] == AffineOperator()
    assert cs.matrix[gr][gq] == AffineOperator(p00=one, p10=PolyK([0, 1]))
    assert cs.matrix[gr][gr] == AffineOperator(p00=one, p10=PolyK([-1, 1]))


def test_counting_requires_orbitised():
    with pytest.raises(PreconditionError):
        build_counting_system(load_fixture('universal'))


def test_pair_names_disambiguate_orbits():
    names, pairs, transitions = pair_names(orbitise(load_fixture('example31')))
    assert set(names.values()) >= {'G_p', 'G_q', 'G_r', 'G_s'}
    assert len(names) == len(pairs)
    for _, src, dst in transitions:
        assert src in names and dst in names


# ---------------------------------------------------------------------------
# Oracle agreement
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('name', ['example31', 'almost-universal',
                                  'two-register', 'universal', 'empty'])
def test_table_matches_oracle(name):
    a = orbitise(load_fixture(name))
    cs = build_counting_system(a)
    table = evaluate(cs, 5, 5)
    counts, accepted = oracle_table(a, 5, 5, check=False)
    names, pairs, _ = pair_names(a)
    for pair in pairs:
        tab = counts.get(pair, {})
        for n in range(6):
            for k in range(6):
                assert table.get(names[pair], n, k) == tab.get((n, k), 0)
    for n in range(6):
        for k in range(6):
            assert table.get('G', n, k) == \
                table.get('S', n, k) - accepted.get((n, k), 0)


def test_oracle_count_point():
    a = orbitise(load_fixture('universal'))
    point, acc = oracle_count(a, 2, 1)
    assert acc == 1  # the single canonical word a(1)a(1) of width 1
    assert sum(point.values()) >= 1


def test_oracle_rejects_guessing():
    from orbitcount.automata import parse_automaton
    guessing = parse_automaton("""registers 1
alphabet a
locations p
initial p
final p
rule p a p "x1' != _ & x1' != y"
""")
    with pytest.raises(PreconditionError):
        oracle_table(guessing, 2, 2)


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

@pytest.mark.parametrize('name', ['universal', 'example31', 'two-register'])
def test_sections_match_table(name):
    cs = build_counting_system(orbitise(load_fixture(name)))
    table = evaluate(cs, 8, 8)
    L = 3
    first = evaluate_1d(section(cs, 'first', L), 8)
    second = evaluate_1d(section(cs, 'second', L), 8)
    for v in cs.all_names():
        for M in range(L + 1):
            for x in range(9):
                assert first[f"{v}@{M}"][x] == table.get(v, M, x)
                assert second[f"{v}@{M}"][x] == table.get(v, x, M)


def test_section_rejects_bad_axis():
    with pytest.raises(ValueError):
        section(stirling_system(1), 'third', 1)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_system_json_roundtrip():
    cs = build_counting_system(orbitise(load_fixture('example31')))
    doc = system_to_json(cs)
    back = system_from_json(doc)
    assert back.variables == cs.variables
    assert back.boundaries == cs.boundaries
    assert back.derived == cs.derived
    assert back.matrix == cs.matrix


def test_table_to_csv_format():
    table = evaluate(stirling_system(1), 2, 2)
    text = table_to_csv(table)
    lines = text.strip().split('\n')
    assert lines[0] == 'var,n,k,value'
    assert 'S,2,1,1/1' in lines
    assert 'S,2,2,1/1' in lines
