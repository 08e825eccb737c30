"""Shift skew polynomials in S2 over the commutative ring Q[k, S1].

The coefficient ring Q[k, S1] is plain bivariate polynomials; S2 is the skew
indeterminate with commutation S2 * c(k, S1) = c(k+1, S1) * S2.  SkewPoly is
generic over the coefficient type: PolyKS1 (polynomial coefficients) or
RatFunc (the fraction field Q(k, S1), for Hermite normal forms).

Provides pseudo-division, common left multiples via the Euclidean scheme,
application of operators to bidimensional sequence tables, and a text
rendering/parsing round trip.
"""

from fractions import Fraction
from math import gcd as int_gcd, lcm as int_lcm

from .counting import NEG_INF, PolyK, polyk_divmod, _render_frac


# ---------------------------------------------------------------------------
# PolyKS1: sparse bivariate polynomials, keys (deg_k, deg_S1)
# ---------------------------------------------------------------------------

class PolyKS1:
    __slots__ = ('terms',)

    def __init__(self, terms=()):
        d = {}
        for key, c in (terms.items() if isinstance(terms, dict) else terms):
            c = Fraction(c)
            if c:
                d[key] = d.get(key, Fraction(0)) + c
                if not d[key]:
                    del d[key]
        self.terms = d

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({(0, 0): 1})

    @classmethod
    def const(cls, c):
        return cls({(0, 0): Fraction(c)})

    @classmethod
    def k(cls):
        return cls({(1, 0): 1})

    @classmethod
    def s1(cls, e=1):
        return cls({(0, e): 1})

    @classmethod
    def from_polyk(cls, p, s1deg=0):
        return cls({(i, s1deg): c for i, c in enumerate(p.coeffs)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        d = dict(self.terms)
        for key, c in other.terms.items():
            d[key] = d.get(key, Fraction(0)) + c
            if not d[key]:
                del d[key]
        out = PolyKS1.__new__(PolyKS1)
        out.terms = d
        return out

    def __neg__(self):
        out = PolyKS1.__new__(PolyKS1)
        out.terms = {key: -c for key, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return PolyKS1()
            out = PolyKS1.__new__(PolyKS1)
            out.terms = {key: c * other for key, c in self.terms.items()}
            return out
        d = {}
        if (all(c.denominator == 1 for c in self.terms.values())
                and all(c.denominator == 1 for c in other.terms.values())):
            # integer fast path: accumulate as plain ints
            a = [(key, c.numerator) for key, c in self.terms.items()]
            b = [(key, c.numerator) for key, c in other.terms.items()]
            for (i1, j1), c1 in a:
                for (i2, j2), c2 in b:
                    key = (i1 + i2, j1 + j2)
                    d[key] = d.get(key, 0) + c1 * c2
            d = {key: Fraction(v) for key, v in d.items() if v}
        else:
            for (i1, j1), c1 in self.terms.items():
                for (i2, j2), c2 in other.terms.items():
                    key = (i1 + i2, j1 + j2)
                    d[key] = d.get(key, Fraction(0)) + c1 * c2
                    if not d[key]:
                        del d[key]
        out = PolyKS1.__new__(PolyKS1)
        out.terms = d
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyKS1) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def deg_s1(self):
        return max((j for _, j in self.terms), default=NEG_INF)

    @property
    def deg_k(self):
        return max((i for i, _ in self.terms), default=NEG_INF)

    @property
    def total_degree(self):
        return max((i + j for i, j in self.terms), default=NEG_INF)

    def shift_k(self, amount):
        """Substitute k <- k + amount."""
        if amount == 0 or not self.terms:
            return self
        by_s1 = self.by_s1()
        out = {}
        for j, p in by_s1.items():
            for i, c in enumerate(p.shift(amount).coeffs):
                if c:
                    out[(i, j)] = c
        r = PolyKS1.__new__(PolyKS1)
        r.terms = out
        return r

    def by_s1(self):
        """Map S1-degree -> PolyK coefficient."""
        cols = {}
        for (i, j), c in self.terms.items():
            cols.setdefault(j, {})[i] = c
        return {j: PolyK([col.get(i, 0) for i in range(max(col) + 1)])
                for j, col in cols.items()}

    def lc_s1(self):
        """Leading PolyK coefficient as a polynomial in S1 over Q[k]."""
        j = self.deg_s1
        return self.by_s1()[j]

    def leading_rat(self):
        """Coefficient at the graded-lexicographically largest monomial."""
        key = max(self.terms, key=lambda t: (t[0] + t[1], t))
        return self.terms[key]

    def eval_s1_zero_polyk(self):
        """As a PolyK, requiring no S1 occurrences."""
        if self.deg_s1 not in (NEG_INF, 0):
            raise ValueError("polynomial mentions S1")
        col = {i: c for (i, j), c in self.terms.items()}
        return PolyK([col.get(i, 0) for i in range(max(col, default=-1) + 1)])

    def render(self):
        return render_polyks1(self)

    def __repr__(self):
        return f"PolyKS1<{self.render()}>"


def polyks1_from_s1_map(mapping):
    """Build from {S1-degree: PolyK}."""
    terms = {}
    for j, p in mapping.items():
        for i, c in enumerate(p.coeffs):
            if c:
                terms[(i, j)] = c
    return PolyKS1(terms)


def polyks1_divexact(a, b):
    """Exact division in Q[k, S1]; raises if b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("exact division by zero")
    if a.is_zero():
        return PolyKS1()
    if (all(c.denominator == 1 for c in a.terms.values())
            and all(c.denominator == 1 for c in b.terms.values())):
        try:
            return _from_zbiv(_zb_divexact(_to_zbiv(a), _to_zbiv(b)))
        except ValueError:
            pass  # quotient exists over Q but not over Z, or no quotient
    bc = b.by_s1()
    db = b.deg_s1
    blc = bc[db]
    quo = {}
    rem = a
    while not rem.is_zero():
        da = rem.deg_s1
        if da < db:
            raise ValueError("inexact division")
        q, r = polyk_divmod(rem.lc_s1(), blc)
        if not r.is_zero():
            raise ValueError("inexact division")
        quo[da - db] = quo.get(da - db, PolyK()) + q
        rem = rem - PolyKS1.from_polyk(q, da - db) * b
    return polyks1_from_s1_map(quo)


def normalize_polyks1(p):
    """Divide out rational content; make the leading coefficient positive."""
    if p.is_zero():
        return p
    s = _rational_content(p.terms.values())
    if p.leading_rat() < 0:
        s = -s
    return p * (1 / s)


def _rational_content(fracs):
    nums = [abs(f.numerator) for f in fracs]
    dens = [f.denominator for f in fracs]
    g = 0
    for x in nums:
        g = int_gcd(g, x)
    l = 1
    for x in dens:
        l = int_lcm(l, x)
    return Fraction(g, l)


# The gcd runs on plain-int coefficient lists: a Z[k] element is a list of
# ints (ascending k-degree), a Z[k][S1] element a list of those (ascending
# S1-degree).  Fraction arithmetic on the intermediate remainders is the
# dominant cost otherwise.

def _zp_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _zp_mul(f, g):
    if not f or not g:
        return []
    if min(len(f), len(g)) < 20:
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a:
                for j, b in enumerate(g):
                    out[i + j] += a * b
        return _zp_trim(out)
    # Kronecker substitution: evaluate at 2^(8w) and use native integer
    # multiplication; signs handled by splitting into nonnegative parts
    n = len(f) + len(g) - 1
    bf = max(abs(c) for c in f)
    bg = max(abs(c) for c in g)
    w = ((bf * bg * min(len(f), len(g))).bit_length() + 3 + 7) // 8

    def enc(vals):
        ba = bytearray(len(vals) * w)
        for i, c in enumerate(vals):
            if c:
                nb = (c.bit_length() + 7) // 8
                ba[i * w:i * w + nb] = c.to_bytes(nb, 'little')
        return int.from_bytes(ba, 'little')

    fp = enc([c if c > 0 else 0 for c in f])
    fn = enc([-c if c < 0 else 0 for c in f])
    gp = enc([c if c > 0 else 0 for c in g])
    gn = enc([-c if c < 0 else 0 for c in g])
    pos = (fp * gp + fn * gn).to_bytes(n * w + 8, 'little')
    neg = (fp * gn + fn * gp).to_bytes(n * w + 8, 'little')
    out = [int.from_bytes(pos[i * w:i * w + w], 'little')
           - int.from_bytes(neg[i * w:i * w + w], 'little')
           for i in range(n)]
    return _zp_trim(out)


def _zp_sub(f, g):
    out = list(f) + [0] * (len(g) - len(f))
    for i, b in enumerate(g):
        out[i] -= b
    return _zp_trim(out)


def _zp_content(f):
    g = 0
    for c in f:
        g = int_gcd(g, c)
    return g


def _zp_prem(f, g):
    """Integer pseudo-remainder: lc(g)^(deg f - deg g + 1) * f mod g."""
    dg = len(g) - 1
    lcg = g[-1]
    e = len(f) - 1 - dg + 1
    r = list(f)
    while r and len(r) - 1 >= dg:
        c = r[-1]
        d = len(r) - 1 - dg
        r = _zp_sub([x * lcg for x in r], [0] * d + [x * c for x in g])
        e -= 1
    for _ in range(e):
        r = [x * lcg for x in r]
    return r


def _zp_gcd(f, g):
    """Univariate gcd over Z by a primitive remainder sequence."""
    f, g = _zp_trim(list(f)), _zp_trim(list(g))
    if not f:
        return _zp_pos(g)
    if not g:
        return _zp_pos(f)
    cont = int_gcd(_zp_content(f), _zp_content(g))
    f = [c // _zp_content(f) for c in f]
    g = [c // _zp_content(g) for c in g]
    if len(f) < len(g):
        f, g = g, f
    while g:
        r = _zp_prem(f, g)
        if r:
            rc = _zp_content(r)
            r = [c // rc for c in r]
        f, g = g, r
    if len(f) == 1:
        return [cont]
    return _zp_pos([c * cont for c in f])


def _zp_pos(f):
    return [-c for c in f] if f and f[-1] < 0 else f


def _zp_divexact(f, g):
    """Exact division in Z[k]; stepwise integer quotients exist whenever the
    true quotient has integer coefficients."""
    if not f:
        return []
    quo = [0] * (len(f) - len(g) + 1)
    r = list(f)
    while r and len(r) >= len(g):
        q, m = divmod(r[-1], g[-1])
        assert m == 0, "inexact division"
        d = len(r) - len(g)
        quo[d] = q
        r = _zp_sub(r, [0] * d + [x * q for x in g])
    assert not r, "inexact division"
    return _zp_trim(quo)


def _zb_trim(A):
    while A and not A[-1]:
        A.pop()
    return A


def _zb_scale(A, c):
    return _zb_trim([_zp_mul(c, f) for f in A])


def _zb_content(A):
    g = []
    for f in A:
        g = _zp_gcd(g, f)
    return g


def _zb_div_coeffs(A, d):
    return [_zp_divexact(f, d) for f in A]


def _zb_prem(A, B):
    """Pseudo-remainder in S1 with Z[k] coefficients:
    lc(B)^(deg A - deg B + 1) * A = Q*B + result."""
    dB = len(B) - 1
    blc = B[-1]
    e = len(A) - 1 - dB + 1
    R = [list(f) for f in A]
    while R and len(R) - 1 >= dB:
        c = R[-1]
        d = len(R) - 1 - dB
        shifted = [[] for _ in range(d)] + [_zp_mul(c, f) for f in B]
        R = _zb_trim([_zp_sub(_zp_mul(blc, f), s)
                      for f, s in zip(R, shifted)])
        e -= 1
    for _ in range(e):
        R = _zb_scale(R, blc)
    return R


def _zb_divexact(A, B):
    """Exact division in Z[k][S1]; ValueError when a stepwise integer
    quotient fails to exist (in particular when B does not divide A)."""
    if not B:
        raise ZeroDivisionError("exact division by zero")
    if not A:
        return []
    dB = len(B) - 1
    blc = B[-1]
    if len(A) - 1 < dB:
        raise ValueError("inexact division")
    quo = [[] for _ in range(len(A) - dB)]
    R = [list(f) for f in A]
    while R:
        if len(R) - 1 < dB:
            raise ValueError("inexact division")
        d = len(R) - 1 - dB
        try:
            q = _zp_divexact(R[-1], blc)
        except AssertionError:
            raise ValueError("inexact division") from None
        quo[d] = q
        shifted = [[] for _ in range(d)] + [_zp_mul(q, f) for f in B]
        R = _zb_trim([_zp_sub(f, s) for f, s in zip(R, shifted)])
    return quo


def _zb_eval_s1(A, b):
    """Evaluate at S1 = b, landing in Z[k]."""
    acc = []
    pw = 1
    for f in A:
        if len(acc) < len(f):
            acc += [0] * (len(f) - len(acc))
        for i, c in enumerate(f):
            acc[i] += c * pw
        pw *= b
    return _zp_trim(acc)


def _zb_eval_k(A, a):
    """Evaluate at k = a, landing in Z[S1]."""
    out = []
    for f in A:
        v = 0
        for c in reversed(f):
            v = v * a + c
        out.append(v)
    return _zp_trim(out)


def _certify_coprime(A, B):
    """True only if the primitive parts A, B provably have constant gcd.

    A nonconstant gcd d would divide every evaluation gcd; a univariate gcd
    that is constant at more points than d's degree bound in the other
    variable forces that degree to zero.  False negatives are harmless."""
    d1 = min(len(A), len(B)) - 1
    for b in range(1, d1 + 2):
        if len(_zp_gcd(_zb_eval_s1(A, b), _zb_eval_s1(B, b))) > 1:
            return False
    d2 = min(max((len(f) for f in A if f), default=1),
             max((len(f) for f in B if f), default=1)) - 1
    for a in range(1, d2 + 2):
        if len(_zp_gcd(_zb_eval_k(A, a), _zb_eval_k(B, a))) > 1:
            return False
    return True


def _zp_eval(f, a):
    v = 0
    for c in reversed(f):
        v = v * a + c
    return v


def _interp_points():
    yield 0
    a = 1
    while True:
        yield a
        yield -a
        a += 1


def _lagrange_interp(xs, ys):
    """Coefficients (ascending, Fractions) of the poly through (xs, ys)."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    acc = [Fraction(1)]
    for i in range(n):
        for d, c in enumerate(acc):
            poly[d] += coef[i] * c
        new = [Fraction(0)] * (len(acc) + 1)
        for d, c in enumerate(acc):
            new[d + 1] += c
            new[d] -= xs[i] * c
        acc = new
    while poly and not poly[-1]:
        poly.pop()
    return poly


def _interp_gcd_zbiv(A, B):
    """Gcd of the primitive A, B in Z[k][S1] (positive S1-degrees) by
    evaluating k at integer points, taking univariate gcds, and
    interpolating; the caller verifies by trial division.  Points whose
    univariate gcd degree exceeds the running minimum are unlucky and
    dropped.  Returns a PolyKS1 candidate or None."""
    lcA, lcB = A[-1], B[-1]
    gamma = _zp_gcd(lcA, lcB)
    dk = min(max(len(c) for c in A), max(len(c) for c in B)) - 1
    need = dk + len(gamma)
    xs, ys = [], []
    dstar = None
    budget = 4 * need + 16
    for a in _interp_points():
        budget -= 1
        if budget < 0:
            return None
        if _zp_eval(lcA, a) == 0 or _zp_eval(lcB, a) == 0:
            continue
        u = _zp_gcd(_zb_eval_k(A, a), _zb_eval_k(B, a))
        du = len(u) - 1
        if du == 0:
            return PolyKS1.one()
        if dstar is None or du < dstar:
            dstar = du
            xs, ys = [], []
        elif du > dstar:
            continue
        scale = Fraction(_zp_eval(gamma, a), u[-1])
        xs.append(a)
        ys.append([Fraction(c) * scale for c in u])
        if len(xs) == need:
            break
    terms = {}
    for j in range(dstar + 1):
        for i, c in enumerate(_lagrange_interp(xs, [v[j] for v in ys])):
            if c:
                terms[(i, j)] = c
    return PolyKS1(terms)


def _to_zbiv(p):
    """PolyKS1 -> Z[k][S1] coefficient lists, up to a rational unit."""
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // int_gcd(den, c.denominator)
    A = [[0] * (p.deg_k + 1) for _ in range(p.deg_s1 + 1)]
    for (i, j), c in p.terms.items():
        A[j][i] = int(c * den)
    return _zb_trim([_zp_trim(f) for f in A])


def _from_zbiv(A):
    terms = {}
    for j, f in enumerate(A):
        for i, c in enumerate(f):
            if c:
                terms[(i, j)] = Fraction(c)
    return PolyKS1(terms)


def gcd_polyks1(a, b):
    """Bivariate gcd by content/primitive-part recursion with a subresultant
    polynomial remainder sequence over integer coefficients; result
    normalized (integer content 1, positive leading coefficient)."""
    if a.is_zero():
        return normalize_polyks1(b)
    if b.is_zero():
        return normalize_polyks1(a)
    A, B = _to_zbiv(a), _to_zbiv(b)
    ca, cb = _zb_content(A), _zb_content(B)
    cg = _zp_gcd(ca, cb)
    A = _zb_div_coeffs(A, ca)
    B = _zb_div_coeffs(B, cb)
    if len(A) < len(B):
        A, B = B, A
    if _certify_coprime(A, B):
        return normalize_polyks1(_from_zbiv([cg]))
    if len(A) > 1 and len(B) > 1:
        cand = _interp_gcd_zbiv(A, B)
        if cand is not None and not cand.is_zero():
            # strip the imposed leading factor: primitive part w.r.t. k
            Z = _to_zbiv(cand)
            H = normalize_polyks1(_from_zbiv(
                _zb_div_coeffs(Z, _zb_content(Z))))
            try:
                pa, pb = _from_zbiv(A), _from_zbiv(B)
                polyks1_divexact(pa, H)
                polyks1_divexact(pb, H)
                return normalize_polyks1(_from_zbiv([cg]) * H)
            except ValueError:
                pass  # unlucky interpolation; certified below instead
    g = [1]
    h = [1]
    while True:
        delta = len(A) - len(B)
        R = _zb_prem(A, B)
        if not R:
            prim = _zb_div_coeffs(B, _zb_content(B))
            return normalize_polyks1(_from_zbiv(_zb_scale(prim, cg)))
        if len(R) == 1:
            return normalize_polyks1(_from_zbiv([cg]))
        divisor = g
        for _ in range(delta):
            divisor = _zp_mul(divisor, h)
        A = B
        B = _zb_div_coeffs(R, divisor)
        g = A[-1]
        # h <- g^delta * h^(1-delta); exact by the subresultant theory
        if delta > 0:
            hnum = [1]
            for _ in range(delta):
                hnum = _zp_mul(hnum, g)
            for _ in range(delta - 1):
                hnum = _zp_divexact(hnum, h)
            h = hnum


def shift_k(c, amount):
    """The shift automorphism k <- k + amount on any coefficient value."""
    return c.shift_k(amount)


# ---------------------------------------------------------------------------
# RatFunc: the fraction field Q(k, S1)
# ---------------------------------------------------------------------------

class RatFunc:
    __slots__ = ('num', 'den')

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction)):
            num = PolyKS1.const(num)
        if den is None:
            den = PolyKS1.one()
        elif isinstance(den, (int, Fraction)):
            den = PolyKS1.const(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = PolyKS1(), PolyKS1.one()
        else:
            g = gcd_polyks1(num, den)
            num = polyks1_divexact(num, g)
            den = polyks1_divexact(den, g)
            nden = normalize_polyks1(den)
            # scale numerator by the same unit used to normalize the denominator
            s = _rational_content(den.terms.values())
            if den.leading_rat() < 0:
                s = -s
            num = num * (1 / s)
            den = nden
        self.num = num
        self.den = den

    @classmethod
    def zero(cls):
        return cls(PolyKS1())

    @classmethod
    def one(cls):
        return cls(PolyKS1.one())

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        other = _as_ratfunc(other)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = RatFunc.__new__(RatFunc)
        out.num = -self.num
        out.den = self.den
        return out

    def __sub__(self, other):
        return self + (-_as_ratfunc(other))

    def __mul__(self, other):
        other = _as_ratfunc(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * _as_ratfunc(other).inv()

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction, PolyKS1)):
                other = _as_ratfunc(other)
            else:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def shift_k(self, amount):
        out = RatFunc.__new__(RatFunc)
        out.num = self.num.shift_k(amount)
        out.den = self.den.shift_k(amount)
        return out

    def render(self):
        if self.den == PolyKS1.one():
            return self.num.render()
        return f"({self.num.render()})/({self.den.render()})"

    def __repr__(self):
        return f"RatFunc<{self.render()}>"


def _as_ratfunc(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, PolyKS1):
        return RatFunc(x)
    return RatFunc(PolyKS1.const(x))


# ---------------------------------------------------------------------------
# SkewPoly over PolyKS1 or RatFunc
# ---------------------------------------------------------------------------

class SkewPoly:
    """Polynomial in S2, coefficient list by ascending S2-degree."""

    __slots__ = ('coeffs', 'ring')

    def __init__(self, coeffs, ring=PolyKS1):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = coeffs
        self.ring = ring

    @classmethod
    def zero(cls, ring=PolyKS1):
        return cls([], ring)

    @classmethod
    def one(cls, ring=PolyKS1):
        return cls([ring.one()], ring)

    @classmethod
    def monomial(cls, coef, deg, ring=PolyKS1):
        return cls([ring.zero()] * deg + [coef], ring)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self):
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1]

    def coef(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.ring.zero()

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return SkewPoly([self.coef(i) + other.coef(i) for i in range(n)], self.ring)

    def __neg__(self):
        return SkewPoly([-c for c in self.coeffs], self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SkewPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return SkewPoly.zero(self.ring)
        out = [self.ring.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b.shift_k(i)
        return SkewPoly(out, self.ring)

    def scale_left(self, c):
        """Left multiplication by a coefficient (no commutation needed)."""
        return SkewPoly([c * x for x in self.coeffs], self.ring)

    def __eq__(self, other):
        return (isinstance(other, SkewPoly) and self.ring is other.ring
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.ring, tuple(self.coeffs)))

    def map_coeffs(self, f, ring=None):
        return SkewPoly([f(c) for c in self.coeffs], ring or self.ring)

    def render(self):
        return render_skew(self)

    def __repr__(self):
        return f"SkewPoly<{self.render()}>"


def skew_normalize_joint(polys):
    """Divide a family of PolyKS1/SkewPoly values by their joint content in
    Q[k, S1] (a common polynomial factor plus the rational unit); sign fixed
    by the first nonzero leading coefficient.  Any identity that is linear in
    the family is preserved up to that unit."""
    coeffs = []
    for p in polys:
        if isinstance(p, PolyKS1):
            coeffs.append(p)
        else:
            coeffs.extend(p.coeffs)
    coeffs = [c for c in coeffs if not c.is_zero()]
    if not coeffs:
        return list(polys)
    # fold smallest coefficients first so the running gcd shrinks early
    coeffs.sort(key=lambda c: (c.total_degree, len(c.terms)))
    content = PolyKS1()
    for c in coeffs:
        content = gcd_polyks1(content, c)
        if content.total_degree == 0:
            break

    def strip(c):
        return c if c.is_zero() else polyks1_divexact(c, content)

    if content.total_degree > 0:
        polys = [strip(p) if isinstance(p, PolyKS1)
                 else p.map_coeffs(strip) for p in polys]
    fracs = []
    lead = None
    for p in polys:
        if isinstance(p, PolyKS1):
            fracs.extend(p.terms.values())
            if lead is None and not p.is_zero():
                lead = p.leading_rat()
        else:
            for c in p.coeffs:
                fracs.extend(c.terms.values())
            if lead is None and not p.is_zero():
                lead = p.lc().leading_rat()
    fracs = [f for f in fracs if f]
    s = _rational_content(fracs)
    if lead is not None and lead < 0:
        s = -s
    inv = 1 / s
    out = []
    for p in polys:
        if isinstance(p, PolyKS1):
            out.append(p * inv)
        else:
            out.append(p.scale_left(PolyKS1.const(inv)))
    return out


def pseudo_division(A, B):
    """a*A = P*B + Q with deg Q < deg B; coefficients in Q[k, S1].

    Each cancellation step uses the gcd-reduced multiplier pair
    a' = sigma^(m-n)(lc B)/g, b' = lc R/g, g their gcd."""
    if B.is_zero():
        raise ZeroDivisionError("pseudo-division by zero")
    if A.degree < B.degree:
        return PolyKS1.one(), SkewPoly.zero(A.ring), A
    n = B.degree
    bn = B.lc()
    a_total = PolyKS1.one()
    P = SkewPoly.zero(A.ring)
    R = A
    while not R.is_zero() and R.degree >= n:
        m = R.degree
        t = bn.shift_k(m - n)
        g = gcd_polyks1(R.lc(), t)
        aP = polyks1_divexact(t, g)
        bP = polyks1_divexact(R.lc(), g)
        shifted_b = SkewPoly.monomial(PolyKS1.one(), m - n) * B
        R = R.scale_left(aP) - shifted_b.scale_left(bP)
        P = P.scale_left(aP) + SkewPoly.monomial(bP, m - n)
        a_total = aP * a_total
        # unit rescaling keeps the identity and the coefficients small
        a_total, P, R = skew_normalize_joint([a_total, P, R])
    return a_total, P, R


def _kernel_vector(M, cols):
    """A nonzero polynomial kernel vector of an underdetermined matrix over
    Q[k, S1], by one-step fraction-free Gauss-Jordan elimination (every
    division by the previous pivot is exact; entries stay minor-sized)."""
    rows = len(M)
    piv_cols = []
    prev = PolyKS1.one()
    r = 0
    for c in range(cols):
        cand = [(M[i][c].total_degree, i)
                for i in range(r, rows) if not M[i][c].is_zero()]
        if not cand:
            continue
        _, p = min(cand)
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        for i in range(rows):
            if i == r:
                continue
            fac = M[i][c]
            M[i] = [polyks1_divexact(piv * M[i][j] - fac * M[r][j], prev)
                    for j in range(cols)]
        prev = piv
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    f0 = next(c for c in range(cols) if c not in piv_cols)
    v = [PolyKS1() for _ in range(cols)]
    v[f0] = prev
    for i, c in enumerate(piv_cols):
        v[c] = -M[i][f0]
    return v


def _lcm_polyks1(a, b):
    return polyks1_divexact(a, gcd_polyks1(a, b)) * b


def clm(A, B):
    """Common left multiple: nonzero C, D with C*A = D*B,
    deg C <= deg B, deg D <= deg A.

    The coefficients of C and D solve a homogeneous linear system over
    Q(k, S1) (one equation per S2-degree of C*A - D*B), which keeps every
    intermediate value determinant-bounded; the Euclidean cofactor chain
    satisfies the same contract but blows up coefficient degrees."""
    if A.is_zero() or B.is_zero():
        raise ZeroDivisionError("clm of zero")
    ring = A.ring

    def to_poly(p):
        """Clear denominators: returns (lam, lam.p) with polynomial coefficients."""
        if p.ring is not RatFunc:
            return PolyKS1.one(), p
        lam = PolyKS1.one()
        for c in p.coeffs:
            if not c.is_zero():
                lam = _lcm_polyks1(lam, c.den)
        return lam, p.map_coeffs(
            lambda c: c.num * polyks1_divexact(lam, c.den), ring=PolyKS1)

    lamA, A1 = to_poly(A)
    lamB, B1 = to_poly(B)
    m, n = A1.degree, B1.degree
    rows = m + n + 1
    cols = m + n + 2
    M = [[PolyKS1()] * cols for _ in range(rows)]
    for i in range(n + 1):
        for l in range(i, i + m + 1):
            M[l][i] = A1.coef(l - i).shift_k(i)
    for j in range(m + 1):
        for l in range(j, j + n + 1):
            M[l][n + 1 + j] = -B1.coef(l - j).shift_k(j)
    v = _kernel_vector(M, cols)
    C = SkewPoly(v[:n + 1], PolyKS1)
    D = SkewPoly(v[n + 1:], PolyKS1)
    if ring is RatFunc:
        # the kernel was computed against lam.A and lam.B
        C = C * SkewPoly([lamA])
        D = D * SkewPoly([lamB])
    C, D = skew_normalize_joint([C, D])
    assert not C.is_zero() and not D.is_zero()
    if ring is RatFunc:
        C = C.map_coeffs(RatFunc, ring=RatFunc)
        D = D.map_coeffs(RatFunc, ring=RatFunc)
    return C, D


def apply(P, table, var):
    """Apply an operator with PolyKS1 coefficients to a table: S1 shifts n
    (both the S2-level structure's S1 inside coefficients and nothing else),
    S2 shifts k, k-monomials evaluate at the source index."""
    s2max = P.degree
    if s2max is NEG_INF:
        s2max = 0
    s1max = 0
    for c in P.coeffs:
        if not c.is_zero():
            s1max = max(s1max, c.deg_s1)
    rows = table.data[var]
    N = table.N - s1max
    K = table.K - s2max
    if N < 0 or K < 0:
        raise ValueError("table too small for the operator's shifts")
    out = [[Fraction(0)] * (K + 1) for _ in range(N + 1)]
    for n in range(N + 1):
        for k in range(K + 1):
            acc = Fraction(0)
            for j, c in enumerate(P.coeffs):
                for (i, e), q in c.terms.items():
                    acc += q * Fraction(k) ** i * rows[n + e][k + j]
            out[n][k] = acc
    return out


# ---------------------------------------------------------------------------
# Rendering and parsing
# ---------------------------------------------------------------------------

def _render_mono(coef, kdeg, s1deg):
    factors = []
    if kdeg:
        factors.append("k" if kdeg == 1 else f"k^{kdeg}")
    if s1deg:
        factors.append("S1" if s1deg == 1 else f"S1^{s1deg}")
    mag = abs(coef)
    if not factors or mag != 1:
        factors.insert(0, _render_frac(mag))
    return "*".join(factors)


def render_polyks1(p):
    if p.is_zero():
        return "0"
    by_s1 = p.by_s1()
    degrees = sorted(by_s1, reverse=True)
    if degrees == [0]:
        return by_s1[0].render()
    pieces = []
    for j in degrees:
        kp = by_s1[j]
        monos = [(i, c) for i, c in enumerate(kp.coeffs) if c]
        if len(monos) == 1:
            i, c = monos[0]
            pieces.append((c > 0, _render_mono(c, i, j)))
        else:
            neg = kp.coeffs[-1] < 0
            body = f"({(-kp if neg else kp).render()})"
            if j:
                body += "*S1" if j == 1 else f"*S1^{j}"
            pieces.append((not neg, body))
    return _join_pieces(pieces)


def _coeff_factor(c):
    """Render a PolyKS1 for use as a multiplicative factor: (positive, body)."""
    by_s1 = c.by_s1()
    degrees = sorted(by_s1, reverse=True)
    if _polyks1_piece_count(c) == 1:
        (i, e), q = next(iter(c.terms.items()))
        return q > 0, _render_mono(q, i, e)
    if len(degrees) == 1:
        j = degrees[0]
        kp = by_s1[j]
        neg = kp.coeffs[-1] < 0
        body = f"({(-kp if neg else kp).render()})"
        if j:
            body += "*S1" if j == 1 else f"*S1^{j}"
        return not neg, body
    neg = by_s1[degrees[0]].coeffs[-1] < 0
    return not neg, f"({render_polyks1(-c if neg else c)})"


def _join_pieces(pieces):
    out = []
    for pos, body in pieces:
        if not out:
            out.append(body if pos else "-" + body)
        else:
            out.append(("+ " if pos else "- ") + body)
    return " ".join(out)


def _polyks1_piece_count(p):
    n = 0
    for kp in p.by_s1().values():
        n += sum(1 for c in kp.coeffs if c)
    return n


def render_skew(P):
    """E.g. (S1^2 - S1 - (k+1))*S2^2 - S2."""
    if P.is_zero():
        return "0"
    pieces = []
    for j in range(len(P.coeffs) - 1, -1, -1):
        c = P.coeffs[j]
        if isinstance(c, RatFunc):
            if c.is_zero():
                continue
            body = c.render()
            if j:
                wrap = not (c.den == PolyKS1.one() and _polyks1_piece_count(c.num) == 1)
                if wrap:
                    body = f"({body})"
                body += "*S2" if j == 1 else f"*S2^{j}"
            pieces.append((True, body))
            continue
        if c.is_zero():
            continue
        if j == 0:
            s = render_polyks1(c)
            pos = not s.startswith("-")
            pieces.append((pos, s[1:] if not pos else s))
            continue
        pos, body = _coeff_factor(c)
        if body == "1":
            body = ""
        mono = "S2" if j == 1 else f"S2^{j}"
        body = body + "*" + mono if body else mono
        pieces.append((pos, body))
    return _join_pieces(pieces)


class SkewParseError(ValueError):
    pass


def parse_skew(text):
    """Parse the rendered grammar over k, S1, S2, integers, + - * / ^ ( )."""
    tokens = _tokenize_skew(text)
    pos = [0]

    def peek():
        return tokens[pos[0]]

    def advance():
        t = tokens[pos[0]]
        pos[0] += 1
        return t

    def atom():
        t = advance()
        if t == '(':
            e = expr()
            if advance() != ')':
                raise SkewParseError("')' expected")
            return e
        if t == 'k':
            return SkewPoly([PolyKS1.k()])
        if t == 'S1':
            return SkewPoly([PolyKS1.s1()])
        if t == 'S2':
            return SkewPoly.monomial(PolyKS1.one(), 1)
        if isinstance(t, Fraction):
            return SkewPoly([PolyKS1.const(t)])
        raise SkewParseError(f"unexpected token {t!r}")

    def power():
        base = atom()
        if peek() == '^':
            advance()
            t = advance()
            if not isinstance(t, Fraction) or t.denominator != 1 or t < 0:
                raise SkewParseError("exponent must be a natural number")
            out = SkewPoly.one()
            for _ in range(int(t)):
                out = out * base
            return out
        return base

    def unary():
        if peek() == '-':
            advance()
            return -unary()
        if peek() == '+':
            advance()
            return unary()
        return power()

    def product():
        out = unary()
        while peek() == '*':
            advance()
            out = out * unary()
        return out

    def expr():
        out = product()
        while peek() in ('+', '-'):
            op = advance()
            rhs = product()
            out = out + rhs if op == '+' else out - rhs
        return out

    e = expr()
    if peek() != 'end':
        raise SkewParseError("trailing input")
    return e


def _tokenize_skew(text):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ' \t\n':
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == '/'):
                j += 1
            toks.append(Fraction(text[i:j]))
            i = j
            continue
        if text.startswith('S1', i):
            toks.append('S1')
            i += 2
            continue
        if text.startswith('S2', i):
            toks.append('S2')
            i += 2
            continue
        if ch == 'k':
            toks.append('k')
            i += 1
            continue
        if ch in '+-*^()':
            toks.append(ch)
            i += 1
            continue
        raise SkewParseError(f"unexpected character {ch!r}")
    toks.append('end')
    return toks
