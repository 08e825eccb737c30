"""Acceptance suite: one test per acceptance criterion, in order."""

import os
import time
from math import comb, factorial

from orbitcount.automata import (accepts, check_properties, find_rejected_word,
                                 orbitise, reduce_inclusion_to_universality)
from orbitcount.cli import run
from orbitcount.counting import (PolyK, build_counting_system, canonical_words,
                                 evaluate, evaluate_1d, oracle_table,
                                 pair_names, section, stirling_system)
from orbitcount.skewalg import PolyKS1, RatFunc, SkewPoly
from orbitcount.zeroness import (CancellingRelation2, decide_zeroness,
                                 elimination_relation, hnf,
                                 hnf_zeroness_backend, section_cr, sylvester,
                                 verify_relation)

from _helpers import (FIXTURE_NAMES, FIXTURES, load_fixture,
                      random_automaton, seeded)
from test_skewalg import (run_clm_suite, run_pseudo_division_suite,
                          run_skew_ring_law_suite)

K = PolyK.k()


def c(x):
    return PolyK.const(x)


def fixture_system(name):
    return build_counting_system(orbitise(load_fixture(name)))


def fx(name):
    return os.path.join(FIXTURES, name + '.ra')


WORKED_EXAMPLES = ['example31', 'two-register', 'almost-universal']

# Printed relations, frozen: coefficients of f(n+i, k+j), evaluated at the
# source index k.
REL_ALMOST_UNIVERSAL = CancellingRelation2(
    'G', {(3, 3): c(1), (2, 2): c(-1), (2, 3): -(K + c(3))})
REL_TWO_REGISTERS = CancellingRelation2(
    'G', {(4, 3): c(1), (3, 3): -(2 * K + c(4)), (3, 2): c(-2),
          (2, 3): K * K + 4 * K + c(3), (2, 2): 2 * K + c(3), (2, 1): c(1)})
# The two printed variants of the four-term relation for the running example
# disagree with each other; neither annihilates the table (the final
# elimination step they come from drops a non-commuting factor), so the
# validated pinned relation below is the one produced by our elimination.
REL_EXAMPLE_VARIANTS = [
    CancellingRelation2('G', {(4, 4): c(1), (3, 4): -(K + c(3)),
                              (3, 3): c(-1), (2, 4): K + c(2), (2, 3): c(1)}),
    CancellingRelation2('G', {(4, 4): c(1), (3, 4): -(K + c(4)),
                              (3, 3): c(-1), (2, 4): K + c(3), (2, 3): c(1)}),
]
REL_EXAMPLE_PINNED = CancellingRelation2(
    'G', {(0, 3): c(1), (0, 4): 2 * K + c(8), (0, 5): K * K + 9 * K + c(20),
          (1, 4): c(-2), (1, 5): -(2 * K + c(9)), (2, 5): c(1)})
REL_HERMITE_CLEARED = CancellingRelation2(
    'G_s', {(2, 2): c(1), (1, 2): c(-1), (0, 2): -(K + c(1)), (0, 1): c(-1)})


def test_criterion_01_stirling_cross_check():
    """Counting table equals independent set-partition counts, n,k <= 15."""
    start = time.monotonic()
    table = evaluate(stirling_system(1), 15, 15)

    def stirling2(n, k):
        # inclusion-exclusion closed form, independent of any recurrence
        if n == 0 or k == 0:
            return 1 if n == k else 0
        acc = sum((-1) ** i * comb(k, i) * (k - i) ** n for i in range(k + 1))
        q, r = divmod(acc, factorial(k))
        assert r == 0
        return q

    for n in range(16):
        for k in range(16):
            assert table.get('S', n, k) == stirling2(n, k), (n, k)

    # explicit enumeration cross-check at small sizes
    for n in range(9):
        counts = {}
        def rec(labels, mx):
            if len(labels) == n:
                counts[mx] = counts.get(mx, 0) + 1
                return
            for v in range(1, mx + 2):
                rec(labels + [v], max(mx, v))
        rec([], 0)
        for k in range(n + 1):
            assert table.get('S', n, k) == counts.get(k, 1 if n == 0 else 0)
    assert time.monotonic() - start < 5.0


def test_criterion_02_master_oracle_equivalence():
    """Counting tables equal brute-force orbit counts entry-wise, n,k <= 7."""
    start = time.monotonic()
    automata = [orbitise(load_fixture(name)) for name in WORKED_EXAMPLES]
    rng = seeded(20240801)
    automata += [random_automaton(rng) for _ in range(50)]
    for a in automata:
        props = check_properties(a)
        assert props.non_guessing
        cs = build_counting_system(a)
        table = evaluate(cs, 7, 7)
        counts, accepted = oracle_table(a, 7, 7, check=False)
        names, pairs, _ = pair_names(a)
        for pair in pairs:
            tab = counts.get(pair, {})
            for n in range(8):
                for k in range(8):
                    assert table.get(names[pair], n, k) == tab.get((n, k), 0)
        if props.unambiguous:
            for n in range(8):
                for k in range(8):
                    assert table.get('G', n, k) == \
                        table.get('S', n, k) - accepted.get((n, k), 0)
    assert time.monotonic() - start < 120.0


def test_criterion_03_printed_relations_annihilate():
    """Frozen printed relations pass; the conflicting variants both fail and
    the validated pinned relation is the elimination output."""
    t = evaluate(fixture_system('almost-universal'), 12, 12)
    assert verify_relation(REL_ALMOST_UNIVERSAL, t, 'G')
    t = evaluate(fixture_system('two-register'), 12, 12)
    assert verify_relation(REL_TWO_REGISTERS, t, 'G')

    sys31 = fixture_system('example31')
    t = evaluate(sys31, 12, 12)
    for variant in REL_EXAMPLE_VARIANTS:
        assert not verify_relation(variant, t, 'G')
    pinned = elimination_relation(sys31, 'G')
    assert pinned.terms == REL_EXAMPLE_PINNED.terms
    assert verify_relation(pinned, t, 'G')


def test_criterion_04_elimination_soundness():
    """Every test system yields a verified nonzero CR-2 and verified
    section relations for the first four sections."""
    systems = [(fixture_system(name), 'G') for name in FIXTURE_NAMES]
    systems.append((stirling_system(1), 'S'))
    for sys, target in systems:
        rel = elimination_relation(sys, target)
        assert rel.terms
        table = evaluate(sys, 12, 12)
        assert verify_relation(rel, table, target)
        for M in range(4):
            rel1 = section_cr(sys, M, target)
            data = evaluate_1d(section(sys, 'first', M), 24)
            assert verify_relation(rel1, data[f"{target}@{M}"])


def test_criterion_05_hermite_golden():
    """The 2x2 worked example reproduces the printed Hermite form, the
    cleared last-row relation, and the printed Sylvester matrix."""
    Z, O = PolyKS1.zero(), PolyKS1.one()
    k, s1 = PolyKS1.k(), PolyKS1.s1()
    A = [[SkewPoly([Z, s1 - O]), SkewPoly([Z, -O])],
         [SkewPoly([-O, -k]), SkewPoly([Z, s1])]]
    A = [[e.map_coeffs(RatFunc, ring=RatFunc) for e in row] for row in A]
    form = hnf(A)
    assert form.d == (0, 2)
    assert form.H[0][0] == SkewPoly([RatFunc.one()], RatFunc)
    assert form.H[1][0].is_zero()
    assert form.H[0][1] == SkewPoly(
        [RatFunc.zero(), RatFunc(k - s1 * s1 + s1, s1 - O)], RatFunc)
    assert form.H[1][1] == SkewPoly(
        [RatFunc.zero(), RatFunc(-O, s1 * s1 - s1 - k - O), RatFunc.one()],
        RatFunc)

    last = form.H[1][1]
    den = last.coeffs[1].den
    cleared = last.map_coeffs(lambda x: x * RatFunc(den))
    got = {}
    for j, coef in enumerate(cleared.coeffs):
        assert coef.den == PolyKS1.one()
        for i, p in coef.num.by_s1().items():
            got[(i, j)] = p
    assert got == REL_HERMITE_CLEARED.terms

    P = SkewPoly([PolyKS1.const(7), Z, PolyKS1.const(4), PolyKS1.const(5)])
    expected = [[5, 4, 0, 7, 0, 0],
                [0, 5, 4, 0, 7, 0],
                [0, 0, 5, 4, 0, 7]]
    assert sylvester(P, 5, 2) == \
        [[PolyKS1.const(v) for v in row] for row in expected]


def test_criterion_06_backend_agreement():
    """Elimination and Hermite backends give the same verdict and witness."""
    systems = [(name, fixture_system(name), 'G') for name in FIXTURE_NAMES]
    systems.append(('stirling', stirling_system(1), 'S'))
    for name, sys, target in systems:
        a = decide_zeroness(sys, target)
        b = hnf_zeroness_backend(sys, target)
        assert (a.is_zero, a.witness) == (b.is_zero, b.witness), name


def test_criterion_07_end_to_end_decisions(capsys):
    """CLI verdicts with witnesses, consistent with exhaustive acceptance."""
    def universal_up_to(a, depth):
        return all(accepts(a, w) for n in range(depth + 1)
                   for w in canonical_words(a.alphabet, n))

    def included_up_to(a, b, depth):
        return all(accepts(b, w) for n in range(depth + 1)
                   for w in canonical_words(a.alphabet, n) if accepts(a, w))

    # failing universality with a grid witness at n < 2
    for name in ['example31', 'almost-universal']:
        code = run(['check', 'universality', fx(name)])
        out = capsys.readouterr().out
        assert code == 1
        assert 'universality fails: NONZERO n=0' in out
        assert not universal_up_to(load_fixture(name), 6)
    code = run(['check', 'universality', fx('universal')])
    assert code == 0
    assert 'universality holds' in capsys.readouterr().out
    assert universal_up_to(load_fixture('universal'), 6)

    code = run(['check', 'inclusion', fx('example31'), fx('universal')])
    assert code == 0
    assert 'inclusion holds' in capsys.readouterr().out
    assert included_up_to(load_fixture('example31'),
                          load_fixture('universal'), 6)

    code = run(['check', 'inclusion', fx('universal'), fx('example31')])
    out = capsys.readouterr().out
    assert code == 1
    assert 'inclusion fails' in out
    assert 'counterexample: ' in out
    # the reported counterexample word has length <= 2
    word_line = next(l for l in out.splitlines()
                     if l.startswith('counterexample:'))
    body = word_line.split(': ', 1)[1]
    length = 0 if body == '<empty word>' else len(body.split())
    assert length <= 2
    assert not included_up_to(load_fixture('universal'),
                              load_fixture('example31'), 6)


def test_criterion_08_algebra_property_suites():
    """Randomized ring laws, pseudo-division, and common-left-multiple
    identities, 500 cases each, plus the named two-shift example."""
    run_skew_ring_law_suite(500, 20240801)
    run_pseudo_division_suite(500, 20240802)
    run_clm_suite(500, 20240803)
    from test_skewalg import test_clm_named_case
    test_clm_named_case()


def test_criterion_09_reduction_soundness_at_depth():
    """Finite-depth inclusion agrees with finite-depth universality of the
    reduction output for 20 automaton pairs."""
    pairs = [
        ('example31', 'universal'), ('universal', 'example31'),
        ('almost-universal', 'universal'), ('universal', 'almost-universal'),
        ('empty', 'example31'), ('example31', 'almost-universal'),
        ('two-register', 'universal'), ('empty', 'empty'),
    ]
    todo = [(orbitise(load_fixture(x)), load_fixture(y)) for x, y in pairs]
    rng = seeded(97)
    while len(todo) < 20:
        a = random_automaton(rng)
        b = random_automaton(rng)
        pb = check_properties(b)
        if not pb.unambiguous:
            continue
        todo.append((a, b))
    depth = 5
    for a, b in todo:
        direct = all(accepts(b, w)
                     for n in range(depth + 1)
                     for w in canonical_words(a.alphabet, n) if accepts(a, w))
        red = reduce_inclusion_to_universality(a, b)
        via_reduction = find_rejected_word(red, depth) is None
        assert direct == via_reduction


def test_criterion_10_monicity_report(capsys):
    """The monic flag is emitted for every produced CR-2, and the pinned
    validated relations of the worked examples are monic."""
    for name in FIXTURE_NAMES:
        rel = elimination_relation(fixture_system(name), 'G')
        assert 'monic=' in rel.render()
        assert 'monic' in rel.to_json()
    run(['cr', fx('universal')])
    assert 'monic=' in capsys.readouterr().out

    pinned = [REL_EXAMPLE_PINNED, REL_TWO_REGISTERS, REL_ALMOST_UNIVERSAL,
              REL_HERMITE_CLEARED]
    for rel in pinned:
        assert rel.monic
        assert 'monic=true' in rel.render()
