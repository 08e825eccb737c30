"""Zeroness of linrec systems with polynomial-in-k coefficients.

Two backends produce a cancelling relation for the target sequence: variable
elimination over the skew ring (common left multiples, cross-subtraction),
and a Hermite-normal-form computation on the Sylvester linearization.  The
relation bounds a finite grid; the sequence is zero iff it vanishes there.
"""

from fractions import Fraction
from math import gcd as int_gcd, lcm as int_lcm

from .counting import NEG_INF, evaluate, section
from .skewalg import (PolyKS1, RatFunc, SkewPoly, clm, polyks1_divexact,
                      skew_normalize_joint, _lcm_polyks1)


# ---------------------------------------------------------------------------
# Cancelling relations
# ---------------------------------------------------------------------------

class CancellingRelation2:
    """Sum of p_{i,j}(k) * S1^i S2^j annihilating a bidimensional sequence;
    the lead is the lexicographically maximal (i, j) with nonzero
    coefficient."""

    def __init__(self, target, terms):
        clean = {key: p for key, p in terms.items() if not p.is_zero()}
        if not clean:
            raise ValueError("cancelling relation must be nonzero")
        self.target = target
        self.terms = clean
        self.lead = max(clean)

    @property
    def monic(self):
        return self.terms[self.lead].degree == 0

    def shifts(self):
        return (max(i for i, _ in self.terms), max(j for _, j in self.terms))

    def render(self):
        i, j = self.lead
        lines = [f"CR2 target={self.target} lead=({i},{j}) "
                 f"monic={'true' if self.monic else 'false'}"]
        for key in sorted(self.terms):
            lines.append(f"({key[0]},{key[1]}): {self.terms[key].render()}")
        return "\n".join(lines)

    def to_json(self):
        return {
            "type": "cr2",
            "target": self.target,
            "lead": list(self.lead),
            "monic": self.monic,
            "terms": {f"{i},{j}": [_frac_str(c) for c in p.coeffs]
                      for (i, j), p in sorted(self.terms.items())},
        }


class CancellingRelation1:
    """Sum of p_j(k) * S^j annihilating a one-dimensional sequence."""

    def __init__(self, target, terms):
        clean = {j: p for j, p in terms.items() if not p.is_zero()}
        if not clean:
            raise ValueError("cancelling relation must be nonzero")
        self.target = target
        self.terms = clean
        self.lead = max(clean)

    @property
    def monic(self):
        return self.terms[self.lead].degree == 0

    def render(self):
        lines = [f"CR1 target={self.target} lead={self.lead} "
                 f"monic={'true' if self.monic else 'false'}"]
        for j in sorted(self.terms):
            lines.append(f"({j}): {self.terms[j].render()}")
        return "\n".join(lines)

    def to_json(self):
        return {
            "type": "cr1",
            "target": self.target,
            "lead": self.lead,
            "monic": self.monic,
            "terms": {str(j): [_frac_str(c) for c in p.coeffs]
                      for j, p in sorted(self.terms.items())},
        }


def _frac_str(c):
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# From linrec systems to skew matrices
# ---------------------------------------------------------------------------

def system_to_matrix(sys):
    """Row i encodes S1 S2 f_i - sum_j (p00 + p01 S1 + p10 S2) f_j = 0 over
    the shift variables (full rank: the diagonal's combined degree 2 beats
    every off-diagonal term)."""
    m = len(sys.variables)
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            op = sys.matrix[i][j]
            c0 = -(PolyKS1.from_polyk(op.p00) + PolyKS1.from_polyk(op.p01, 1))
            c1 = -PolyKS1.from_polyk(op.p10)
            if i == j:
                c1 = c1 + PolyKS1.s1()
            row.append(SkewPoly([c0, c1], PolyKS1))
        rows.append(row)
    return rows


def full_matrix(sys, target):
    """system_to_matrix with the definition row of a derived target adjoined;
    returns (rows, column names, target column index)."""
    rows = system_to_matrix(sys)
    names = list(sys.variables)
    if target in names:
        return rows, names, names.index(target)
    for name, combo in sys.derived:
        if name != target:
            continue
        for r in rows:
            r.append(SkewPoly.zero(PolyKS1))
        row = []
        for v in sys.variables:
            c = Fraction(combo.get(v, 0))
            row.append(SkewPoly([PolyKS1.const(-c)]) if c
                       else SkewPoly.zero(PolyKS1))
        row.append(SkewPoly.one(PolyKS1))
        rows.append(row)
        names.append(name)
        return rows, names, len(names) - 1
    raise KeyError(f"unknown variable {target!r}")


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------

def _eliminate_rows(matrix, target):
    """Cross-eliminate every column but the target via common left multiples;
    returns the smallest surviving nonzero relation (a SkewPoly)."""
    rows = [list(r) for r in matrix]
    ncols = len(rows[0]) if rows else 0
    active = [c for c in range(ncols) if c != target]
    while active:
        def cost(c):
            mention = [r for r in rows if not r[c].is_zero()]
            return (len(mention),
                    sum(max(r[c].degree, 0) for r in mention))

        c = min(active, key=cost)
        active.remove(c)
        mention = [i for i, r in enumerate(rows) if not r[c].is_zero()]
        if not mention:
            continue
        piv = min(mention,
                  key=lambda i: (rows[i][c].degree,
                                 sum(1 for e in rows[i] if not e.is_zero())))
        out = []
        for i, r in enumerate(rows):
            if i == piv:
                continue
            if r[c].is_zero():
                out.append(r)
                continue
            C, D = clm(r[c], rows[piv][c])
            nr = [(C * r[j]) - (D * rows[piv][j]) for j in range(ncols)]
            out.append(skew_normalize_joint(nr))
        rows = out
    cands = [r[target] for r in rows if not r[target].is_zero()]
    if not cands:
        raise RuntimeError("elimination degenerated to the zero relation")
    best = min(cands, key=lambda P: (P.degree,
                                     sum(len(x.terms) for x in P.coeffs)))
    return skew_normalize_joint([best])[0]


def skew_to_cr2(R, target):
    """Expand PolyKS1 coefficients of S2-monomials into (i, j)-indexed
    polynomial-in-k terms."""
    terms = {}
    for j, c in enumerate(R.coeffs):
        for i, p in c.by_s1().items():
            terms[(i, j)] = p
    return CancellingRelation2(target, terms)


def eliminate(matrix, target, target_name="f"):
    """Cancelling relation for one column of a full-rank skew matrix."""
    return skew_to_cr2(_eliminate_rows(matrix, target), target_name)


def section_cr(sys, M, target):
    """CR-1 for the first-index-M section of the target sequence, by
    elimination over the one-shift skew ring Q[k][S2]."""
    if M < 0:
        raise ValueError("section index must be nonnegative")
    sys1 = section(sys, 'first', M)
    names = list(sys1.variables)
    m1 = len(names)
    rows = []
    for i in range(m1):
        row = [SkewPoly.zero(PolyKS1) for _ in range(m1)]
        row[i] = SkewPoly.monomial(PolyKS1.one(), 1)
        for coef, shift, j in sys1.equations[i]:
            row[j] = row[j] - SkewPoly.monomial(PolyKS1.from_polyk(coef),
                                                shift)
        rows.append(row)
    tname = f"{target}@{M}"
    if tname in names:
        t = names.index(tname)
    else:
        combo = dict(next(c for nm, c in sys1.derived if nm == tname))
        for r in rows:
            r.append(SkewPoly.zero(PolyKS1))
        row = []
        for v in names:
            c = Fraction(combo.get(v, 0))
            row.append(SkewPoly([PolyKS1.const(-c)]) if c
                       else SkewPoly.zero(PolyKS1))
        row.append(SkewPoly.one(PolyKS1))
        rows.append(row)
        t = m1
        names.append(tname)
    R = _eliminate_rows(rows, t)
    terms = {}
    for j, c in enumerate(R.coeffs):
        by = c.by_s1()
        assert set(by) <= {0}, "section relation left the one-shift ring"
        if 0 in by:
            terms[j] = by[0]
    return CancellingRelation1(tname, terms)


# ---------------------------------------------------------------------------
# Certificates against tables
# ---------------------------------------------------------------------------

def verify_relation(rel, table, var=None):
    """True iff the relation annihilates the table at every applicable index.

    CR-2 takes a SequenceTable and a variable name; CR-1 takes the section
    values as a list."""
    if isinstance(rel, CancellingRelation2):
        di, dj = rel.shifts()
        if table.N < di or table.K < dj:
            raise ValueError("table too small for the relation's shifts")
        for n in range(table.N - di + 1):
            for k in range(table.K - dj + 1):
                acc = Fraction(0)
                for (i, j), p in rel.terms.items():
                    acc += p.eval_at(k) * table.get(var, n + i, k + j)
                if acc:
                    return False
        return True
    seq = list(table)
    if len(seq) <= rel.lead:
        raise ValueError("sequence too short for the relation's shifts")
    for x in range(len(seq) - rel.lead):
        acc = Fraction(0)
        for j, p in rel.terms.items():
            acc += p.eval_at(x) * seq[x + j]
        if acc:
            return False
    return True


def lagrange_root_bound(p):
    """Integer upper bound on the real roots: 1 + deg * max |a_i| after
    clearing to (content-free) integer coefficients; 0 for constants."""
    if p.is_zero():
        raise ValueError("zero polynomial has no root bound")
    if p.degree == 0:
        return 0
    l = 1
    for c in p.coeffs:
        l = int_lcm(l, c.denominator)
    ints = [int(c * l) for c in p.coeffs]
    g = 0
    for c in ints:
        g = int_gcd(g, c)
    return 1 + p.degree * max(abs(c) // g for c in ints)


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------

class ZeronessVerdict:
    """is_zero, witness (n, k, value) for nonzero verdicts, and the
    cancelling relation that determined the grid."""

    def __init__(self, is_zero, witness, relation):
        self.is_zero = is_zero
        self.witness = witness
        self.relation = relation

    def render(self):
        if self.is_zero:
            return "ZERO"
        n, k, value = self.witness
        return f"NONZERO n={n} k={k} value={_frac_str(value)}"

    def to_json(self):
        out = {"zero": self.is_zero, "relation": self.relation.to_json()}
        if not self.is_zero:
            n, k, value = self.witness
            out["witness"] = {"n": n, "k": k, "value": _frac_str(value)}
        return out


def _grid_verdict(sys, target, rel2):
    """Finite grid induced by a CR-2: second-index rows k = 0..K checked to
    the order of the fixed-k section system (a constant-coefficient system is
    zero iff that many leading values vanish), first-index rows M = 0..i*
    checked to each section relation's degree plus its root bound."""
    i_star, j_star = rel2.lead
    bound = lagrange_root_bound(rel2.terms[rel2.lead])
    K = 2 + j_star + bound
    m = len(sys.variables)
    checks = set()
    for L in range(K + 1):
        order = len(section(sys, 'second', L).variables)
        for n in range(order + 1):
            checks.add((n, L))
    for M in range(i_star + 1):
        rel1 = section_cr(sys, M, target)
        b1 = lagrange_root_bound(rel1.terms[rel1.lead])
        for k in range(rel1.lead + b1 + 1):
            checks.add((M, k))
    N_max = max(n for n, _ in checks)
    K_max = max(k for _, k in checks)
    table = evaluate(sys, N_max, K_max)
    failing = [pt for pt in checks if table.get(target, pt[0], pt[1]) != 0]
    if not failing:
        return ZeronessVerdict(True, None, rel2)
    n, k = min(failing)
    value = table.get(target, n, k)
    assert value != 0
    return ZeronessVerdict(False, (n, k, value), rel2)


def elimination_relation(sys, target):
    """CR-2 for the target sequence via variable elimination."""
    rows, names, t = full_matrix(sys, target)
    return eliminate(rows, t, target)


def decide_zeroness(sys, target):
    """Zeroness of the target sequence via elimination plus the finite grid."""
    return _grid_verdict(sys, target, elimination_relation(sys, target))


# ---------------------------------------------------------------------------
# Sylvester linearization and Hermite normal forms
# ---------------------------------------------------------------------------

def sylvester(P, n, m):
    """Rows phi_n(S2^m P), ..., phi_n(S2^0 P): coefficient vectors (highest
    degree first, length n+1) linearizing left multiplication by operators of
    degree <= m."""
    deg = P.degree
    if deg is NEG_INF:
        deg = 0
    if deg > n - m:
        raise ValueError("degree of P exceeds n - m")
    ring = P.ring
    rows = []
    for t in range(m, -1, -1):
        Q = SkewPoly.monomial(ring.one(), t, ring) * P
        row = [ring.zero()] * (n + 1)
        for e, c in enumerate(Q.coeffs):
            row[n - e] = c
        rows.append(row)
    return rows


class HermiteForm:
    """H = U.A with H upper triangular, monic leading entries of S2-degrees
    d, and above-diagonal entries of strictly lower degree than their
    column's leading entry."""

    def __init__(self, H, U, d):
        self.H = H
        self.U = U
        self.d = tuple(d)


def _degree_vectors(n, budget):
    for total in range(budget + 1):
        yield from sorted(_compositions(n, total))


def _compositions(n, total):
    if n == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(n - 1, total - head):
            yield (head,) + rest


def _solve_unique(rows, rhs):
    """Unique solution of a (possibly overdetermined) linear system over
    RatFunc, or None when inconsistent or underdetermined.

    Equations are scaled to Q[k, S1] rowwise, eliminated by one-step
    fraction-free Gauss-Jordan (divisions by the previous pivot are exact),
    and the solution is read off as reduced fractions at the end."""
    if not rows:
        return []
    ncols = len(rows[0])
    pruned = []
    for r, b in zip(rows, rhs):
        if all(e.is_zero() for e in r):
            if not b.is_zero():
                return None  # inconsistent
            continue
        pruned.append((r, b))
    m = len(pruned)
    if m < ncols:
        return None  # underdetermined
    aug = []
    for r, b in pruned:
        ents = list(r) + [b]
        lam = PolyKS1.one()
        for e in ents:
            if not e.is_zero():
                lam = _lcm_polyks1(lam, e.den)
        aug.append([e.num * polyks1_divexact(lam, e.den)
                    if not e.is_zero() else PolyKS1() for e in ents])
    prev = PolyKS1.one()
    piv_rows = []
    r = 0
    for c in range(ncols):
        cand = [i for i in range(r, m) if not aug[i][c].is_zero()]
        if not cand:
            return None  # underdetermined
        p = min(cand, key=lambda i: (aug[i][c].total_degree,
                                     len(aug[i][c].terms)))
        aug[r], aug[p] = aug[p], aug[r]
        piv = aug[r][c]
        for i in range(m):
            if i == r:
                continue
            fac = aug[i][c]
            row = aug[i]
            for j in range(c + 1, ncols + 1):
                row[j] = polyks1_divexact(piv * row[j] - fac * aug[r][j],
                                          prev)
            row[c] = PolyKS1()
        prev = piv
        piv_rows.append(r)
        r += 1
    for i in range(r, m):
        if not aug[i][ncols].is_zero():
            return None  # inconsistent
    # after full Jordan reduction every pivot equals the final one
    return [RatFunc(aug[i][ncols], prev) for i in piv_rows]


def _forced_value(i, j, e, d):
    """The Hermite-shape-forced coefficient of H[i][j] at S2-degree e, or
    None when the position is free (removed from the square system)."""
    if j < i:
        return 0
    if j == i:
        if e == d[i]:
            return 1
        if e > d[i]:
            return 0
        return None
    return 0 if e >= d[j] else None


def _solve_row(A, d, rho, dega, i, cache):
    """Row i of (U, H) for the candidate degree vector d; the system depends
    only on the suffix d[i:], so results are shared across candidates."""
    key = (i, tuple(d[i:]))
    if key in cache:
        return cache[key]
    n = len(A)
    E = rho + dega
    rows = []
    rhs = []
    for j in range(n):
        for e in range(E + 1):
            forced = _forced_value(i, j, e, d)
            if forced is None:
                continue
            row = []
            for l in range(n):
                for t in range(rho + 1):
                    row.append(A[l][j].coef(e - t).shift_k(t)
                               if 0 <= e - t else RatFunc.zero())
            rows.append(row)
            rhs.append(RatFunc(forced))
    sol = _solve_unique(rows, rhs)
    if sol is None:
        res = None
    else:
        U_row = [SkewPoly(sol[l * (rho + 1):(l + 1) * (rho + 1)], RatFunc)
                 for l in range(n)]
        H_row = []
        for j in range(n):
            acc = SkewPoly.zero(RatFunc)
            for l in range(n):
                acc = acc + U_row[l] * A[l][j]
            H_row.append(acc)
        res = (U_row, H_row)
    cache[key] = res
    return res


def _try_degree_vector(A, d, rho, dega, cache):
    n = len(A)
    parts = [None] * n
    # bottom rows depend on the shortest suffixes; try them first
    for i in range(n - 1, -1, -1):
        parts[i] = _solve_row(A, d, rho, dega, i, cache)
        if parts[i] is None:
            return None
    U = [p[0] for p in parts]
    H = [p[1] for p in parts]
    if not _check_hermite(H, d):
        return None
    return HermiteForm(H, U, d)


def _check_hermite(H, d):
    n = len(H)
    for i in range(n):
        for j in range(n):
            e = H[i][j]
            if j < i:
                if not e.is_zero():
                    return False
            elif j == i:
                if e.degree != d[i] or e.lc() != RatFunc.one():
                    return False
            else:
                if not e.is_zero() and e.degree >= d[j]:
                    return False
    return True


def hnf(A):
    """Hermite normal form of a square full-rank skew matrix: enumerates
    diagonal degree vectors within the sum bound n*deg A (increasing total,
    then lexicographic) and accepts the first candidate whose linearized
    system has a unique solution passing every Hermite invariant."""
    n = len(A)
    if n == 0:
        return HermiteForm([], [], ())
    if any(len(r) != n for r in A):
        raise ValueError("matrix must be square")
    A = [[e if e.ring is RatFunc else e.map_coeffs(RatFunc, ring=RatFunc)
          for e in row] for row in A]
    dega = max((e.degree for row in A for e in row if not e.is_zero()),
               default=NEG_INF)
    if dega is NEG_INF:
        raise ValueError("zero matrix has no Hermite form")
    dega = max(dega, 0)
    budget = n * dega
    # validation is sound for any multiplier degree cap, so grow the cap
    # (and with it the linearized system) only when nothing validates
    for rho in range(max(dega, 1), n * dega + 1):
        cache = {}
        for d in _degree_vectors(n, budget):
            form = _try_degree_vector(A, d, rho, dega, cache)
            if form is not None:
                _assert_product(form, A)
                return form
    raise ValueError("no degree vector validated (matrix not full rank?)")


def _assert_product(form, A):
    n = len(A)
    for i in range(n):
        for j in range(n):
            acc = SkewPoly.zero(RatFunc)
            for l in range(n):
                acc = acc + form.U[i][l] * A[l][j]
            assert acc == form.H[i][j], "H != U*A"


def hnf_relation(sys, target):
    """CR-2 for the target sequence via the Hermite form: the target variable
    is moved to the last column, the last-row relation is read off, and
    denominators are cleared."""
    rows, names, t = full_matrix(sys, target)
    order = [c for c in range(len(names)) if c != t] + [t]
    rows = [[rows[r][c] for c in order] for r in order]
    A = [[e.map_coeffs(RatFunc, ring=RatFunc) for e in row] for row in rows]
    form = hnf(A)
    last = form.H[-1][-1]
    lam = PolyKS1.one()
    for c in last.coeffs:
        if not c.is_zero():
            lam = _lcm_polyks1(lam, c.den)
    R = SkewPoly([c.num * polyks1_divexact(lam, c.den)
                  if not c.is_zero() else PolyKS1()
                  for c in last.coeffs], PolyKS1)
    R = skew_normalize_joint([R])[0]
    return skew_to_cr2(R, target)


def hnf_zeroness_backend(sys, target):
    """Zeroness via the Hermite form, sharing decide_zeroness's grid phase."""
    return _grid_verdict(sys, target, hnf_relation(sys, target))
