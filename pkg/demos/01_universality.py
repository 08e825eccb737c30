"""Deciding universality of a register automaton by orbit counting.

Walks one automaton through the full pipeline: semantic property checks,
compilation to a bidimensional counting system, a cancelling relation for the
rejected-word count, and the finite-grid zeroness verdict.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from orbitcount.automata import (check_properties, find_rejected_word,
                                 orbitise, parse_automaton)
from orbitcount.counting import build_counting_system, evaluate
from orbitcount.zeroness import decide_zeroness, elimination_relation

FIXTURES = os.path.join(os.path.dirname(__file__), '..', 'tests', 'fixtures')


def show(name):
    print(f"=== {name} ===")
    with open(os.path.join(FIXTURES, name + '.ra')) as fh:
        a = parse_automaton(fh.read())
    props = check_properties(a)
    print(f"deterministic={props.deterministic} "
          f"unambiguous={props.unambiguous} "
          f"non_guessing={props.non_guessing}")

    ao = orbitise(a)
    cs = build_counting_system(ao)
    print(f"counting system variables: {' '.join(cs.all_names())}")

    # G counts orbits of rejected words of length n and width k
    table = evaluate(cs, 5, 5)
    print("G table (rows n=0..5, columns k=0..5):")
    for n in range(6):
        print('  ' + ' '.join(str(table.get('G', n, k)) for k in range(6)))

    rel = elimination_relation(cs, 'G')
    print("cancelling relation for G:")
    for line in rel.render().splitlines():
        print('  ' + line)

    verdict = decide_zeroness(cs, 'G')
    print(f"universality verdict: {verdict.render()}")
    if not verdict.is_zero:
        word = find_rejected_word(a, verdict.witness[0])
        if word is not None:
            text = ' '.join(f"{s}({x})" for s, x in word) or '<empty word>'
            print(f"shortest rejected word: {text}")
    print()


if __name__ == '__main__':
    for name in ['universal', 'almost-universal', 'example31']:
        show(name)
