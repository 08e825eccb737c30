"""The exact skew-polynomial machinery behind the decision procedures.

Shows the twisted commutation rule, common left multiples, pseudo-division,
and the Hermite-normal-form route to a cancelling relation on a small
two-variable system.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from orbitcount.skewalg import (PolyKS1, RatFunc, SkewPoly, clm,
                                pseudo_division)
from orbitcount.zeroness import hnf, sylvester

Z, O = PolyKS1.zero(), PolyKS1.one()
k, s1 = PolyKS1.k(), PolyKS1.s1()

if __name__ == '__main__':
    print("-- twisted commutation: S2 * c(k, S1) = c(k+1, S1) * S2 --")
    s2 = SkewPoly([Z, O])
    c = k * s1
    print(f"S2 * ({c.render()}) = {(s2 * SkewPoly([c])).render()}")
    print()

    print("-- common left multiple --")
    G1 = SkewPoly([Z, Z, s1 - s1 * s1])
    G2 = SkewPoly([-s1, s1 * s1 - k * s1])
    C, D = clm(G1, G2)
    print(f"A = {G1.render()}")
    print(f"B = {G2.render()}")
    print(f"C = {C.render()}")
    print(f"D = {D.render()}")
    print(f"C*A == D*B: {C * G1 == D * G2}")
    print()

    print("-- pseudo-division: a*A = P*B + Q with deg Q < deg B --")
    a, P, Q = pseudo_division(G1, G2)
    print(f"a = {a.render()}")
    print(f"P = {P.render()}")
    print(f"Q = {Q.render()}")
    print(f"identity holds: {G1.scale_left(a) == P * G2 + Q}")
    print()

    print("-- Sylvester linearization of left multiplication --")
    Pc = SkewPoly([PolyKS1.const(7), Z, PolyKS1.const(4), PolyKS1.const(5)])
    for row in sylvester(Pc, 5, 2):
        print('  [' + ', '.join(c.render() for c in row) + ']')
    print()

    print("-- Hermite normal form of a 2x2 skew matrix --")
    A = [[SkewPoly([Z, s1 - O]), SkewPoly([Z, -O])],
         [SkewPoly([-O, -k]), SkewPoly([Z, s1])]]
    A = [[e.map_coeffs(RatFunc, ring=RatFunc) for e in row] for row in A]
    form = hnf(A)
    print(f"diagonal degrees: {form.d}")
    for i in range(2):
        for j in range(2):
            print(f"  H[{i}][{j}] = {form.H[i][j].render()}")
    print("the last row is a cancelling relation for the last variable")
