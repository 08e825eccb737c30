"""Bidimensional linear recursive (linrec) systems and orbit counting.

A linrec system has variables f_1..f_m, shift equations
    f_i(n+1, k+1) = sum_j (p00 + p01*S1 + p10*S2)_{i,j} f_j
with coefficients in Q[k] evaluated at the source index (n, k), where S1
shifts n and S2 shifts k, plus constant boundary rows f(0,0), f(0,>=1),
f(>=1,0).  Orbitised non-guessing register automata compile into such a
system counting orbits of initial runs by length n and width k; the derived
variable G = S - sum of final variables counts rejected word orbits, so the
automaton is universal iff G is identically zero.

Also provides exact evaluation, one-dimensional sections along either axis,
canonical-word enumeration, and the brute-force counting oracle.
"""

import csv
import io
import itertools
from collections import deque
from fractions import Fraction

from . import automata
from .automata import EqualityType, PreconditionError

NEG_INF = float('-inf')


# ---------------------------------------------------------------------------
# Polynomials in k over Q
# ---------------------------------------------------------------------------

class PolyK:
    """Dense univariate polynomial in k with Fraction coefficients."""

    __slots__ = ('coeffs',)

    def __init__(self, coeffs=()):
        coeffs = [Fraction(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @staticmethod
    def const(c):
        return PolyK([Fraction(c)])

    @staticmethod
    def k():
        return PolyK([0, 1])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return PolyK([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                      for i in range(n)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PolyK([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PolyK([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyK(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyK) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def eval_at(self, x):
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, amount):
        """p(k + amount)."""
        acc = PolyK()
        base = PolyK([amount, 1])
        for c in reversed(self.coeffs):
            acc = acc * base + PolyK.const(c)
        return acc

    def render(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("k" if i == 1 else f"k^{i}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{_render_frac(mag)}*{mono}"
            else:
                body = _render_frac(mag)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"PolyK<{self.render()}>"


def _render_frac(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def polyk_divmod(a, b):
    """Exact-arithmetic division over Q[k]."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    rem = list(a.coeffs)
    q = [Fraction(0)] * max(0, len(rem) - len(b.coeffs) + 1)
    bl = b.coeffs[-1]
    while len(rem) >= len(b.coeffs):
        c = rem[-1] / bl
        d = len(rem) - len(b.coeffs)
        q[d] = c
        for i, bc in enumerate(b.coeffs):
            rem[d + i] -= c * bc
        while rem and rem[-1] == 0:
            rem.pop()
        if not rem:
            break
    return PolyK(q), PolyK(rem)


def polyk_gcd(a, b):
    """Monic gcd over Q[k]."""
    while not b.is_zero():
        a, b = b, polyk_divmod(a, b)[1]
    if a.is_zero():
        return a
    return a * (1 / a.coeffs[-1])


# ---------------------------------------------------------------------------
# Linrec systems
# ---------------------------------------------------------------------------

class AffineOperator:
    """p00 + p01*S1 + p10*S2 with PolyK entries."""

    __slots__ = ('p00', 'p01', 'p10')

    def __init__(self, p00=None, p01=None, p10=None):
        self.p00 = p00 if p00 is not None else PolyK()
        self.p01 = p01 if p01 is not None else PolyK()
        self.p10 = p10 if p10 is not None else PolyK()

    def is_zero(self):
        return self.p00.is_zero() and self.p01.is_zero() and self.p10.is_zero()

    def __eq__(self, other):
        return (isinstance(other, AffineOperator)
                and (self.p00, self.p01, self.p10) == (other.p00, other.p01, other.p10))


class LinrecSystem:
    """Square system of shift equations plus boundary constants.

    derived: list of (name, {variable: Fraction}) output rows computed
    pointwise from the shift variables (no shift equation of their own).
    """

    def __init__(self, variables, matrix, boundaries, derived=()):
        self.variables = list(variables)
        self.matrix = matrix
        self.boundaries = dict(boundaries)
        self.derived = list(derived)
        m = len(self.variables)
        assert len(matrix) == m and all(len(row) == m for row in matrix)
        assert set(self.boundaries) == set(self.variables)

    def all_names(self):
        return self.variables + [name for name, _ in self.derived]


class SequenceTable:
    def __init__(self, data, N, K):
        self.data = data
        self.N = N
        self.K = K

    def get(self, var, n, k):
        return self.data[var][n][k]

    def names(self):
        return list(self.data)


def evaluate(sys, N, K):
    """Fill the table by dynamic programming with exact rationals."""
    data = {}
    for v in sys.variables:
        b00, b0k, bn0 = sys.boundaries[v]
        rows = [[Fraction(0)] * (K + 1) for _ in range(N + 1)]
        rows[0][0] = Fraction(b00)
        for k in range(1, K + 1):
            rows[0][k] = Fraction(b0k)
        for n in range(1, N + 1):
            rows[n][0] = Fraction(bn0)
        data[v] = rows
    for n in range(N):
        for k in range(K):
            for i, v in enumerate(sys.variables):
                acc = Fraction(0)
                for j, w in enumerate(sys.variables):
                    op = sys.matrix[i][j]
                    if not op.p00.is_zero():
                        acc += op.p00.eval_at(k) * data[w][n][k]
                    if not op.p01.is_zero():
                        acc += op.p01.eval_at(k) * data[w][n + 1][k]
                    if not op.p10.is_zero():
                        acc += op.p10.eval_at(k) * data[w][n][k + 1]
                data[v][n + 1][k + 1] = acc
    for name, combo in sys.derived:
        rows = [[sum((Fraction(c) * data[v][n][k] for v, c in combo.items()),
                     Fraction(0))
                 for k in range(K + 1)] for n in range(N + 1)]
        data[name] = rows
    return SequenceTable(data, N, K)


def stirling_system(s):
    """S(n+1,k+1) = s*S(n,k) + s*(k+1)*S(n,k+1); Stirling numbers for s=1."""
    assert s >= 1
    op = AffineOperator(p00=PolyK.const(s), p10=PolyK([s, s]))
    return LinrecSystem(['S'], [[op]], {'S': (Fraction(1), Fraction(0), Fraction(0))})


# ---------------------------------------------------------------------------
# Compiling automata to counting systems
# ---------------------------------------------------------------------------

def reachable_orbit_pairs(a):
    """Reachable (location, valuation orbit) pairs of an orbitised automaton,
    together with the orbit-level transitions (rule index, source pair,
    target pair)."""
    d = a.d
    src_range = range(d)
    dst_range = range(d + 1, 2 * d + 1)
    start = EqualityType((0,) * d)
    pairs = set()
    transitions = []
    queue = deque()
    for p in a.initial:
        if (p, start) not in pairs:
            pairs.add((p, start))
            queue.append((p, start))
    while queue:
        loc, et = queue.popleft()
        for i, r in a.rules_from(loc):
            tau = automata.rule_type(a, r)
            if tau.restrict(src_range) != et:
                continue
            target = (r.dst, tau.restrict(dst_range))
            transitions.append((i, (loc, et), target))
            if target not in pairs:
                pairs.add(target)
                queue.append(target)
    return pairs, transitions


def pair_names(a):
    """Stable variable names for the reachable (location, orbit) pairs:
    G_<loc> when the location has a single reachable orbit, otherwise
    G_<loc>[<orbit labels>]; returns (names, ordered pairs, transitions)."""
    pairs, transitions = reachable_orbit_pairs(a)
    by_loc = {}
    for loc, et in pairs:
        by_loc.setdefault(loc, []).append(et)
    names = {}
    ordered_pairs = []
    for loc in a.locations:
        orbits = sorted(by_loc.get(loc, []), key=EqualityType.sort_key)
        for et in orbits:
            if len(orbits) == 1:
                names[(loc, et)] = f"G_{loc}"
            else:
                suffix = "".join('_' if l == 0 else str(l) for l in et.labels)
                names[(loc, et)] = f"G_{loc}[{suffix}]"
            ordered_pairs.append((loc, et))
    return names, ordered_pairs, transitions


def build_counting_system(a):
    """Orbit-counting linrec system of an orbitised non-guessing automaton.

    One variable per reachable (location, valuation orbit) pair counting
    orbits of initial runs ending there, one Stirling-like variable S
    counting word orbits, and the derived variable
    G = S - sum of final-pair variables counting rejected word orbits.
    """
    if not a.orbitised:
        raise PreconditionError("counting system requires an orbitised automaton")
    props = automata.check_properties(a)
    if not props.non_guessing:
        raise PreconditionError("counting system requires a non-guessing automaton")
    d = a.d
    names, ordered_pairs, transitions = pair_names(a)

    variables = [names[p] for p in ordered_pairs] + ['S']
    index = {v: i for i, v in enumerate(variables)}
    m = len(variables)
    matrix = [[AffineOperator() for _ in range(m)] for _ in range(m)]

    def add(row, col, p00=None, p10=None):
        op = matrix[row][col]
        if p00 is not None:
            op.p00 = op.p00 + p00
        if p10 is not None:
            op.p10 = op.p10 + p10

    for i, src, dst in transitions:
        tau = automata.rule_type(a, a.rules[i])
        row = index[names[dst]]
        col = index[names[src]]
        yblock = tau.labels[d]
        if tau.labels.index(yblock) < d:
            # input atom equals a current register value
            add(row, col, p10=PolyK.const(1))
        else:
            # input atom is fresh w.r.t. the registers: either globally fresh
            # (width goes up) or one of the k+1-width(src) unstored old atoms
            src_width = src[1].width
            add(row, col, p00=PolyK.const(1), p10=PolyK([1 - src_width, 1]))

    s = len(a.alphabet)
    srow = index['S']
    matrix[srow][srow] = AffineOperator(p00=PolyK.const(s), p10=PolyK([s, s]))

    start = EqualityType((0,) * d)
    initial_set = set(a.initial)
    boundaries = {}
    for loc, et in ordered_pairs:
        b00 = Fraction(1) if loc in initial_set and et == start else Fraction(0)
        boundaries[names[(loc, et)]] = (b00, Fraction(0), Fraction(0))
    boundaries['S'] = (Fraction(1), Fraction(0), Fraction(0))

    final_set = set(a.final)
    combo = {'S': Fraction(1)}
    for loc, et in ordered_pairs:
        if loc in final_set:
            combo[names[(loc, et)]] = Fraction(-1)
    derived = [('G', combo)]
    return LinrecSystem(variables, matrix, boundaries, derived)


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

class Linrec1System:
    """One-dimensional system S f_i = sum of coef(x) * f_j(x + shift) terms.

    Variables are ordered so every shift-1 term refers to an earlier
    variable; evaluation fills index x+1 in variable order.
    """

    def __init__(self, variables, equations, initials, derived=()):
        self.variables = list(variables)
        self.equations = equations      # per variable: list of (PolyK, shift, var index)
        self.initials = dict(initials)  # variable -> Fraction at index 0
        self.derived = list(derived)    # (name, {variable: Fraction})

    @property
    def order(self):
        return len(self.variables)


def evaluate_1d(sys1, N):
    data = {v: [Fraction(0)] * (N + 1) for v in sys1.variables}
    for v in sys1.variables:
        data[v][0] = Fraction(sys1.initials[v])
    for x in range(N):
        for i, v in enumerate(sys1.variables):
            acc = Fraction(0)
            for coef, shift, j in sys1.equations[i]:
                acc += coef.eval_at(x) * data[sys1.variables[j]][x + shift]
            data[v][x + 1] = acc
    for name, combo in sys1.derived:
        data[name] = [sum((Fraction(c) * data[v][x] for v, c in combo.items()),
                          Fraction(0)) for x in range(N + 1)]
    return data


def section(sys, axis, L):
    """One-dimensional system for the sections f(M, k) (axis='first', running
    index k, levels M = 0..L) or f(n, M) (axis='second', running index n).

    Level 0 plays back the boundary row/column via an auxiliary constant
    variable g per system variable; level M+1 is the shift equation with the
    fixed index specialised.
    """
    if axis not in ('first', 'second'):
        raise ValueError("axis must be 'first' or 'second'")
    m = len(sys.variables)
    variables = [f"{v}@g" for v in sys.variables]
    for M in range(L + 1):
        variables += [f"{v}@{M}" for v in sys.variables]
    idx = {v: i for i, v in enumerate(variables)}
    equations = []
    initials = {}
    one = PolyK.const(1)

    for j, v in enumerate(sys.variables):
        b00, b0k, bn0 = sys.boundaries[v]
        # g_v is the constant boundary sequence
        equations.append([(one, 0, idx[f"{v}@g"])])
        initials[f"{v}@g"] = Fraction(b0k if axis == 'first' else bn0)
    for j, v in enumerate(sys.variables):
        b00, b0k, bn0 = sys.boundaries[v]
        equations.append([(one, 0, idx[f"{v}@g"])])
        initials[f"{v}@0"] = Fraction(b00)
    for M in range(L):
        for i, v in enumerate(sys.variables):
            terms = []
            for j, w in enumerate(sys.variables):
                op = sys.matrix[i][j]
                if axis == 'first':
                    # f_v(M+1, k+1) = p00(k) f_w(M,k) + p01(k) f_w(M+1,k)
                    #                 + p10(k) f_w(M,k+1)
                    if not op.p00.is_zero():
                        terms.append((op.p00, 0, idx[f"{w}@{M}"]))
                    if not op.p01.is_zero():
                        terms.append((op.p01, 0, idx[f"{w}@{M + 1}"]))
                    if not op.p10.is_zero():
                        terms.append((op.p10, 1, idx[f"{w}@{M}"]))
                else:
                    # f_v(n+1, M+1) = p00(M) f_w(n,M) + p01(M) f_w(n+1,M)
                    #                 + p10(M) f_w(n,M+1)
                    if not op.p00.is_zero():
                        terms.append((PolyK.const(op.p00.eval_at(M)), 0, idx[f"{w}@{M}"]))
                    if not op.p01.is_zero():
                        terms.append((PolyK.const(op.p01.eval_at(M)), 1, idx[f"{w}@{M}"]))
                    if not op.p10.is_zero():
                        terms.append((PolyK.const(op.p10.eval_at(M)), 0, idx[f"{w}@{M + 1}"]))
            equations.append(terms)
            boundary = sys.boundaries[v][2 if axis == 'first' else 1]
            initials[f"{v}@{M + 1}"] = Fraction(boundary)

    derived = []
    for name, combo in sys.derived:
        for M in range(L + 1):
            derived.append((f"{name}@{M}",
                            {f"{v}@{M}": c for v, c in combo.items()}))
    return Linrec1System(variables, equations, initials, derived)


# ---------------------------------------------------------------------------
# Canonical words and the brute-force oracle
# ---------------------------------------------------------------------------

def rgs_enumerate(n, k):
    """Restricted-growth strings of length n with max value exactly k."""
    if n == 0:
        if k == 0:
            yield ()
        return
    for seq in automata._rgs_sequences(n):
        if max(seq) == k:
            yield seq


def canonical_words(alphabet, n):
    """All canonical data words of length exactly n (any width)."""
    alphabet = list(alphabet)
    for seq in automata._rgs_sequences(n):
        for syms in itertools.product(alphabet, repeat=n):
            yield tuple(zip(syms, seq))


def oracle_table(a, N, K, check=True):
    """Brute-force run-orbit counts for all 0 <= n <= N, 0 <= k <= K.

    Returns (counts, accepted): counts maps (location, valuation orbit) to a
    table counts[(loc, et)][(n, k)] of run counts over canonical words;
    accepted[(n, k)] counts accepted canonical words.
    """
    if check:
        props = automata.check_properties(a)
        if not props.non_guessing:
            raise PreconditionError("oracle requires a non-guessing automaton")
    finals = set(a.final)
    counts = {}
    accepted = {}

    def record(runs, n, k):
        if k > K:
            return
        for (loc, val), cnt in runs.items():
            et = EqualityType.of_values(val)
            tab = counts.setdefault((loc, et), {})
            tab[(n, k)] = tab.get((n, k), 0) + cnt
        if any(loc in finals and cnt > 0 for (loc, _), cnt in runs.items()):
            accepted[(n, k)] = accepted.get((n, k), 0) + 1

    def extend(runs, sym, atom):
        out = {}
        for (loc, val), cnt in runs.items():
            for _, c2 in automata._step_tagged(
                    a, automata.Configuration(loc, val), sym, atom):
                key = (c2.loc, c2.val)
                out[key] = out.get(key, 0) + cnt
        return out

    start = {}
    for p in a.initial:
        key = (p, (None,) * a.d)
        start[key] = start.get(key, 0) + 1
    record(start, 0, 0)

    def rec(runs, length, mx):
        if length == N:
            return
        for atom in range(1, mx + 2):
            if max(mx, atom) > K:
                continue
            for sym in a.alphabet:
                nxt = extend(runs, sym, atom)
                record(nxt, length + 1, max(mx, atom))
                rec(nxt, length + 1, max(mx, atom))

    rec(start, 0, 0)
    return counts, accepted


def oracle_count(a, n, k):
    """Counts at one grid point: map (location, orbit) -> run count, plus the
    number of accepted canonical words of length n and width k."""
    counts, accepted = oracle_table(a, n, k)
    point = {pair: tab.get((n, k), 0) for pair, tab in counts.items()}
    point = {pair: c for pair, c in point.items() if c}
    return point, accepted.get((n, k), 0)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _frac_str(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _frac_parse(s):
    return Fraction(s)


def system_to_json(sys):
    def poly(p):
        return [_frac_str(c) for c in p.coeffs]
    return {
        'variables': list(sys.variables),
        'equations': [[{'p00': poly(op.p00), 'p01': poly(op.p01), 'p10': poly(op.p10)}
                       for op in row] for row in sys.matrix],
        'boundaries': {v: [_frac_str(b) for b in sys.boundaries[v]]
                       for v in sys.variables},
        'derived': [{'name': name, 'combo': {v: _frac_str(c) for v, c in combo.items()}}
                    for name, combo in sys.derived],
    }


def system_from_json(doc):
    def poly(lst):
        return PolyK([_frac_parse(c) for c in lst])
    matrix = [[AffineOperator(poly(cell['p00']), poly(cell['p01']), poly(cell['p10']))
               for cell in row] for row in doc['equations']]
    boundaries = {v: tuple(_frac_parse(b) for b in bs)
                  for v, bs in doc['boundaries'].items()}
    derived = [(d['name'], {v: _frac_parse(c) for v, c in d['combo'].items()})
               for d in doc.get('derived', [])]
    return LinrecSystem(doc['variables'], matrix, boundaries, derived)


def table_to_csv(table, variables=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(['var', 'n', 'k', 'value'])
    for v in (variables if variables is not None else table.names()):
        rows = table.data[v]
        for n in range(table.N + 1):
            for k in range(table.K + 1):
                w.writerow([v, n, k, _frac_str(rows[n][k])])
    return buf.getvalue()
