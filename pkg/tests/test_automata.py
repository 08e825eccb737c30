"""Automaton parsing, orbits, semantic properties, and constructions."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitcount.automata import (AutomatonSyntaxError, EqualityType,
                                 PreconditionError, accepts, check_properties,
                                 constraint_of_type, constraint_to_types,
                                 determinise_complement, enumerate_equality_types,
                                 find_rejected_word, intersect, orbitise,
                                 parse_automaton, parse_constraint,
                                 reduce_inclusion_to_universality,
                                 render_constraint, serialize, union)
from orbitcount.counting import canonical_words

from _helpers import FIXTURE_NAMES, NONGUESSING_TYPES_1REG, load_fixture


# ---------------------------------------------------------------------------
# Equality types
# ---------------------------------------------------------------------------

def test_equality_type_rejects_non_restricted_growth():
    with pytest.raises(ValueError):
        EqualityType((2, 1))
    with pytest.raises(ValueError):
        EqualityType((1, 3))


def test_equality_type_of_values():
    assert EqualityType.of_values([None, 5, 5, 9]).labels == (0, 1, 1, 2)
    assert EqualityType.of_values([]).labels == ()


@given(st.lists(st.integers(min_value=0, max_value=30), min_size=0, max_size=6))
def test_representative_is_a_fixed_point(raw):
    et = EqualityType.of_values([v if v else None for v in raw])
    assert EqualityType.of_values(et.representative()) == et


def test_restrict_keeps_equalities():
    et = EqualityType((1, 2, 1, 0))
    assert et.restrict([0, 2]).labels == (1, 1)
    assert et.restrict([3, 1]).labels == (0, 1)


def test_enumerate_equality_types_counts():
    # sum over bottom subsets of set-partition counts of the rest
    assert len(enumerate_equality_types(3)) == 15
    mask = [True, False, True]
    assert len(enumerate_equality_types(3, mask)) == 10


def test_non_guessing_one_register_transition_types():
    """The transition types over (x1, y, x1') whose next register only holds
    a value seen in the step are exactly the seven used by the random
    generator."""
    expected = {et.labels for et in NONGUESSING_TYPES_1REG}
    got = set()
    for et in enumerate_equality_types(3, [True, False, True]):
        last = et.labels[2]
        if last == 0 or last in et.labels[:2]:
            got.add(et.labels)
    assert got == expected


def test_constraint_type_roundtrip():
    for et in enumerate_equality_types(3, [True, False, True]):
        c = constraint_of_type(et, 1)
        assert constraint_to_types(c, 1) == [et]


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

def test_parse_serialize_roundtrip():
    for name in FIXTURE_NAMES:
        a = load_fixture(name)
        text = serialize(a)
        b = parse_automaton(text)
        assert serialize(b) == text
        assert b.d == a.d and b.locations == a.locations


def test_parse_rejects_garbage():
    with pytest.raises(AutomatonSyntaxError):
        parse_automaton("registers one\n")


def test_constraint_render_roundtrip():
    for name in FIXTURE_NAMES:
        a = load_fixture(name)
        for r in a.rules:
            text = render_constraint(r.constraint)
            assert render_constraint(parse_constraint(text, a.d)) == text


# ---------------------------------------------------------------------------
# Runs and acceptance
# ---------------------------------------------------------------------------

def test_fixture_acceptance_small_words():
    """Accepted canonical words of length <= 3 per fixture."""
    def lang(a, n):
        return {w for m in range(n + 1) for w in canonical_words(a.alphabet, m)
                if accepts(a, w)}

    a = load_fixture('empty')
    assert lang(a, 3) == set()
    a = load_fixture('universal')
    assert lang(a, 2) == {(), (('a', 1),), (('a', 1), ('a', 1)),
                          (('a', 1), ('a', 2))}
    a = load_fixture('almost-universal')
    assert lang(a, 2) == {(('a', 1), ('a', 1)), (('a', 1), ('a', 2))}
    # first and last atom equal, or all-equal prefix then one different atom
    a = load_fixture('example31')
    got = lang(a, 3)
    assert (('a', 1), ('a', 2), ('a', 1)) in got
    assert (('a', 1), ('a', 1), ('a', 2)) in got
    assert (('a', 1), ('a', 2), ('a', 3)) not in got
    assert () not in got


def test_two_register_language():
    """Three consecutive data values are pairwise distinct."""
    a = load_fixture('two-register')
    for w in canonical_words(['a'], 4):
        atoms = [x for _, x in w]
        expect = all(len({atoms[i], atoms[i + 1], atoms[i + 2]}) == 3
                     for i in range(len(atoms) - 2))
        assert accepts(a, w) == expect


# ---------------------------------------------------------------------------
# Semantic properties
# ---------------------------------------------------------------------------

FIXTURE_PROPS = {
    'example31': (False, True, True),
    'almost-universal': (False, True, True),
    'two-register': (True, True, True),
    'universal': (True, True, True),
    'empty': (True, True, True),
}


def test_fixture_properties():
    for name, (det, unamb, ng) in FIXTURE_PROPS.items():
        p = check_properties(load_fixture(name))
        assert (p.deterministic, p.unambiguous, p.non_guessing) == (det, unamb, ng)


def test_property_counterexamples_replay():
    p = check_properties(load_fixture('example31'))
    w = p.counterexamples['deterministic']
    # a nondeterminism witness is still a word with at least two runs
    assert w is not None


def test_guessing_automaton_detected():
    text = """registers 1
alphabet a
locations p q
initial p
final q
rule p a q "x1' != _ & x1' != y"
"""
    p = check_properties(parse_automaton(text))
    assert not p.non_guessing


def test_ambiguous_automaton_detected():
    text = """registers 1
alphabet a
locations p q r
initial p
final q r
rule p a q "x1' = _"
rule p a r "x1' = _"
"""
    p = check_properties(parse_automaton(text))
    assert not p.unambiguous
    assert p.counterexamples['unambiguous'] == (('a', 1),)


# ---------------------------------------------------------------------------
# Complement, product, union
# ---------------------------------------------------------------------------

def test_determinise_complement_flips_acceptance():
    for name in ['universal', 'two-register', 'empty']:
        a = orbitise(load_fixture(name))
        comp = determinise_complement(a)
        for n in range(4):
            for w in canonical_words(a.alphabet, n):
                assert accepts(comp, w) == (not accepts(a, w))


def test_determinise_complement_requires_deterministic():
    with pytest.raises(PreconditionError):
        determinise_complement(orbitise(load_fixture('example31')))


def test_intersect_and_union_semantics():
    a = load_fixture('example31')
    b = load_fixture('almost-universal')
    both = intersect(a, b)
    either = union(a, b)
    for n in range(4):
        for w in canonical_words(['a'], n):
            assert accepts(both, w) == (accepts(a, w) and accepts(b, w))
            assert accepts(either, w) == (accepts(a, w) or accepts(b, w))


# ---------------------------------------------------------------------------
# Rejected-word search and the inclusion reduction
# ---------------------------------------------------------------------------

def test_find_rejected_word():
    assert find_rejected_word(load_fixture('universal'), 4) is None
    assert find_rejected_word(load_fixture('empty'), 2) == ()
    assert find_rejected_word(load_fixture('example31'), 2) == ()
    a = load_fixture('two-register')
    w = find_rejected_word(a, 3)
    assert w is not None and not accepts(a, w)


def test_reduction_preconditions():
    a = orbitise(load_fixture('example31'))
    with pytest.raises(PreconditionError):
        # left operand must be orbitised
        reduce_inclusion_to_universality(load_fixture('example31'), a)
    guessing = parse_automaton("""registers 1
alphabet a
locations p
initial p
final p
rule p a p "x1' != _ & x1' != y"
""")
    with pytest.raises(PreconditionError):
        reduce_inclusion_to_universality(a, guessing)


def test_reduction_universal_iff_included_small():
    a = orbitise(load_fixture('example31'))
    b = load_fixture('universal')
    red = reduce_inclusion_to_universality(a, b)
    assert find_rejected_word(red, 4) is None
    red_rev = reduce_inclusion_to_universality(orbitise(b), a)
    w = find_rejected_word(red_rev, 4)
    assert w is not None
