"""Language inclusion and equivalence via the reduction to universality.

Inclusion L(a) in L(b) is rewritten as universality of a product automaton
whose alphabet has one letter per rule of a; the product is then decided by
the same counting-plus-zeroness machinery as plain universality.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from orbitcount.automata import (orbitise, parse_automaton,
                                 reduce_inclusion_to_universality)
from orbitcount.cli import run
from orbitcount.counting import build_counting_system
from orbitcount.zeroness import decide_zeroness

FIXTURES = os.path.join(os.path.dirname(__file__), '..', 'tests', 'fixtures')


def load(name):
    with open(os.path.join(FIXTURES, name + '.ra')) as fh:
        return parse_automaton(fh.read())


def fx(name):
    return os.path.join(FIXTURES, name + '.ra')


def direct_reduction(x, y):
    red = reduce_inclusion_to_universality(orbitise(load(x)), load(y))
    cs = build_counting_system(orbitise(red))
    verdict = decide_zeroness(cs, 'G')
    print(f"L({x}) in L({y})?  {verdict.render()}  "
          f"(reduction automaton: {len(red.locations)} locations, "
          f"{len(red.rules)} rules)")


if __name__ == '__main__':
    print("-- library API: reduction to universality --")
    direct_reduction('example31', 'universal')
    direct_reduction('universal', 'example31')
    print()
    print("-- command-line front-end --")
    for args in (['check', 'inclusion', fx('example31'), fx('universal')],
                 ['check', 'inclusion', fx('universal'), fx('example31')],
                 ['check', 'equivalence', fx('universal'),
                  fx('almost-universal')]):
        print(f"$ orbitcount {' '.join(os.path.basename(a) for a in args)}")
        code = run(args)
        print(f"(exit code {code})")
        print()
