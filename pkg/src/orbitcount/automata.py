"""Register automata over equality data.

Atoms are naturals compared only by equality.  A register valuation entry of
None is the undefined value, written `_` in constraints.  Constraints relate
current registers x1..xd, the input atom y, and next registers x1'..xd'.

Provides parsing/serialization of the line-oriented .ra format, orbitisation
(splitting constraints into complete equality types), simulation, semantic
property checks (deterministic / unambiguous / non-guessing), complementation
of deterministic automata, and the reduction of language inclusion to
universality.
"""

import itertools
from collections import deque


class AutomatonError(Exception):
    pass


class AutomatonSyntaxError(AutomatonError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", col {col}" if col is not None else "")
        super().__init__(message + where)


class PreconditionError(AutomatonError):
    pass


# ---------------------------------------------------------------------------
# Constraints
#
# AST nodes (tuples):
#   terms:  ('reg', i)  ('nreg', i)  ('y',)  ('bot',)
#   nodes:  ('eq', t1, t2)  ('not', c)  ('and', c1, c2)  ('or', c1, c2)
# ---------------------------------------------------------------------------

_TERM_KINDS = ('reg', 'nreg', 'y', 'bot')


def _tokenize_constraint(s):
    toks = []
    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch in ' \t':
            i += 1
            continue
        if ch == 'x':
            j = i + 1
            while j < n and s[j].isdigit():
                j += 1
            if j == i + 1:
                raise AutomatonSyntaxError("register index expected after 'x'", col=i)
            idx = int(s[i + 1:j])
            if j < n and s[j] == "'":
                toks.append(('nreg', idx, i))
                i = j + 1
            else:
                toks.append(('reg', idx, i))
                i = j
            continue
        if ch == 'y':
            toks.append(('y', None, i))
            i += 1
            continue
        if ch == '_':
            toks.append(('bot', None, i))
            i += 1
            continue
        if ch == '!':
            if i + 1 < n and s[i + 1] == '=':
                toks.append(('ne', None, i))
                i += 2
            else:
                toks.append(('not', None, i))
                i += 1
            continue
        if ch == '=':
            toks.append(('eq', None, i))
            i += 1
            continue
        if ch == '&':
            toks.append(('and', None, i))
            i += 1
            continue
        if ch == '|':
            toks.append(('or', None, i))
            i += 1
            continue
        if ch == '(':
            toks.append(('lpar', None, i))
            i += 1
            continue
        if ch == ')':
            toks.append(('rpar', None, i))
            i += 1
            continue
        raise AutomatonSyntaxError(f"unexpected character {ch!r} in constraint", col=i)
    toks.append(('end', None, n))
    return toks


def parse_constraint(text, d):
    """Parse a constraint string; register indices are checked against d."""
    toks = _tokenize_constraint(text)
    pos = [0]

    def peek():
        return toks[pos[0]]

    def advance():
        t = toks[pos[0]]
        pos[0] += 1
        return t

    def term():
        kind, val, col = advance()
        if kind == 'reg' or kind == 'nreg':
            if not 1 <= val <= d:
                raise AutomatonSyntaxError(
                    f"register index {val} out of range 1..{d}", col=col)
            return (kind, val)
        if kind == 'y':
            return ('y',)
        if kind == 'bot':
            return ('bot',)
        raise AutomatonSyntaxError("atom expected", col=col)

    def literal():
        a = term()
        kind, _, col = advance()
        if kind not in ('eq', 'ne'):
            raise AutomatonSyntaxError("'=' or '!=' expected", col=col)
        b = term()
        if a[0] == 'bot' and b[0] == 'bot':
            raise AutomatonSyntaxError("'_' may not be compared with '_'", col=col)
        node = ('eq', a, b)
        return node if kind == 'eq' else ('not', node)

    def factor():
        kind, _, col = peek()
        if kind == 'not':
            advance()
            return ('not', factor())
        if kind == 'lpar':
            advance()
            node = disjunction()
            kind2, _, col2 = advance()
            if kind2 != 'rpar':
                raise AutomatonSyntaxError("')' expected", col=col2)
            return node
        return literal()

    def conjunction():
        node = factor()
        while peek()[0] == 'and':
            advance()
            node = ('and', node, factor())
        return node

    def disjunction():
        node = conjunction()
        while peek()[0] == 'or':
            advance()
            node = ('or', node, conjunction())
        return node

    node = disjunction()
    kind, _, col = peek()
    if kind != 'end':
        raise AutomatonSyntaxError("trailing input in constraint", col=col)
    return node


def _render_term(t):
    if t[0] == 'reg':
        return f"x{t[1]}"
    if t[0] == 'nreg':
        return f"x{t[1]}'"
    if t[0] == 'y':
        return "y"
    return "_"


# precedence levels: or=1, and=2, not/literal=3
def _render(node, parent_level):
    kind = node[0]
    if kind == 'eq':
        return f"{_render_term(node[1])} = {_render_term(node[2])}"
    if kind == 'not':
        if node[1][0] == 'eq':
            inner = node[1]
            return f"{_render_term(inner[1])} != {_render_term(inner[2])}"
        return "!(" + _render(node[1], 1) + ")"
    if kind == 'and':
        s = _render_and(node)
        return s if parent_level <= 2 else "(" + s + ")"
    if kind == 'or':
        s = _render(node[1], 1) + " | " + _render(node[2], 1)
        return s if parent_level <= 1 else "(" + s + ")"
    raise ValueError(f"bad constraint node {node!r}")


def _render_and(node):
    return _render(node[1], 2) + " & " + _render(node[2], 2)


def render_constraint(node):
    if node[0] == 'eq':
        return f"{_render_term(node[1])} = {_render_term(node[2])}"
    return _render(node, 1)


def eval_constraint(c, current, inp, nxt):
    """Satisfaction under equality semantics; None (bottom) equals only itself."""
    kind = c[0]
    if kind == 'eq':
        return _term_value(c[1], current, inp, nxt) == _term_value(c[2], current, inp, nxt)
    if kind == 'not':
        return not eval_constraint(c[1], current, inp, nxt)
    if kind == 'and':
        return eval_constraint(c[1], current, inp, nxt) and eval_constraint(c[2], current, inp, nxt)
    if kind == 'or':
        return eval_constraint(c[1], current, inp, nxt) or eval_constraint(c[2], current, inp, nxt)
    raise ValueError(f"bad constraint node {c!r}")


def _term_value(t, current, inp, nxt):
    kind = t[0]
    if kind == 'reg':
        return current[t[1] - 1]
    if kind == 'nreg':
        return nxt[t[1] - 1]
    if kind == 'y':
        return inp
    return None


# ---------------------------------------------------------------------------
# Equality types
# ---------------------------------------------------------------------------

class EqualityType:
    """Canonical orbit of a tuple over atoms-with-bottom.

    labels[p] = 0 when position p is bottom, otherwise the block index of p,
    blocks numbered 1,2,... in order of first occurrence (restricted growth).
    """

    __slots__ = ('labels',)

    def __init__(self, labels):
        labels = tuple(labels)
        nxt = 1
        for l in labels:
            if not 0 <= l <= nxt:
                raise ValueError(f"labels {labels!r} violate restricted growth")
            if l == nxt:
                nxt += 1
        self.labels = labels

    @staticmethod
    def of_values(values):
        """Canonical type of a concrete tuple (entries atoms or None)."""
        block = {}
        labels = []
        for v in values:
            if v is None:
                labels.append(0)
            else:
                if v not in block:
                    block[v] = len(block) + 1
                labels.append(block[v])
        return EqualityType(labels)

    @property
    def positions(self):
        return len(self.labels)

    @property
    def width(self):
        return max(self.labels, default=0)

    def bottom_set(self):
        return tuple(p for p, l in enumerate(self.labels) if l == 0)

    def representative(self):
        """One concrete tuple in the orbit: block b gets atom b."""
        return [l if l else None for l in self.labels]

    def restrict(self, indices):
        return EqualityType.of_values(
            [self.labels[i] if self.labels[i] else None for i in indices])

    def sort_key(self):
        return (self.bottom_set(), self.labels)

    def __eq__(self, other):
        return isinstance(other, EqualityType) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"EqualityType({self.labels!r})"


def _rgs_sequences(m):
    """All restricted-growth sequences of length m over blocks 1,2,..."""
    if m == 0:
        yield ()
        return
    def rec(prefix, mx):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for v in range(1, mx + 2):
            prefix.append(v)
            yield from rec(prefix, max(mx, v))
            prefix.pop()
    yield from rec([], 0)


def enumerate_equality_types(positions, bottom_allowed=None):
    """All equality types in canonical order.

    bottom_allowed: optional boolean mask per position; default all allowed.
    Order: bottom-set lexicographic, then restricted-growth order.
    """
    if bottom_allowed is None:
        bottom_allowed = [True] * positions
    allowed = [p for p in range(positions) if bottom_allowed[p]]
    out = []
    for r in range(len(allowed) + 1):
        for bottoms in itertools.combinations(allowed, r):
            rest = [p for p in range(positions) if p not in bottoms]
            for rgs in _rgs_sequences(len(rest)):
                labels = [0] * positions
                for p, v in zip(rest, rgs):
                    labels[p] = v
                out.append(EqualityType(labels))
    out.sort(key=EqualityType.sort_key)
    return out


def constraint_to_types(c, d):
    """The complete transition types (over 2d+1 positions) satisfying c."""
    mask = [True] * (2 * d + 1)
    mask[d] = False
    found = []
    for et in enumerate_equality_types(2 * d + 1, mask):
        rep = et.representative()
        if eval_constraint(c, rep[:d], rep[d], rep[d + 1:]):
            found.append(et)
    return found


def _position_term(p, d):
    if p < d:
        return ('reg', p + 1)
    if p == d:
        return ('y',)
    return ('nreg', p - d)


def constraint_of_type(et, d):
    """A canonical constraint denoting exactly the given transition type."""
    labels = et.labels
    lits = []
    for p in range(2 * d + 1):
        term = _position_term(p, d)
        l = labels[p]
        if l == 0:
            lits.append(('eq', term, ('bot',)))
            continue
        first = labels.index(l)
        if first < p:
            lits.append(('eq', term, _position_term(first, d)))
        else:
            if p != d:
                lits.append(('not', ('eq', term, ('bot',))))
            for b in range(1, l):
                lits.append(('not', ('eq', term, _position_term(labels.index(b), d))))
    if not lits:
        return ('eq', ('y',), ('y',))
    node = lits[0]
    for lit in lits[1:]:
        node = ('and', node, lit)
    return node


# ---------------------------------------------------------------------------
# Automata
# ---------------------------------------------------------------------------

class Rule:
    __slots__ = ('src', 'sym', 'dst', 'constraint', 'etype')

    def __init__(self, src, sym, dst, constraint, etype=None):
        self.src = src
        self.sym = sym
        self.dst = dst
        self.constraint = constraint
        self.etype = etype

    def render(self):
        return f'rule {self.src} {self.sym} {self.dst} "{render_constraint(self.constraint)}"'

    def __repr__(self):
        return f"Rule({self.render()!r})"


class Configuration:
    __slots__ = ('loc', 'val')

    def __init__(self, loc, val):
        self.loc = loc
        self.val = tuple(val)

    def __eq__(self, other):
        return isinstance(other, Configuration) and (self.loc, self.val) == (other.loc, other.val)

    def __hash__(self):
        return hash((self.loc, self.val))

    def __repr__(self):
        return f"Configuration({self.loc!r}, {self.val!r})"


class Run:
    """start configuration plus (symbol, atom, rule index, configuration) steps."""

    __slots__ = ('start', 'steps')

    def __init__(self, start, steps):
        self.start = start
        self.steps = tuple(steps)

    @property
    def end(self):
        return self.steps[-1][3] if self.steps else self.start

    def __eq__(self, other):
        return isinstance(other, Run) and (self.start, self.steps) == (other.start, other.steps)

    def __hash__(self):
        return hash((self.start, self.steps))

    def __repr__(self):
        return f"Run({self.start!r}, {self.steps!r})"


class RegisterAutomaton:
    def __init__(self, d, alphabet, locations, initial, final, rules,
                 orbitised=False, lint_unsat=()):
        self.d = d
        self.alphabet = tuple(alphabet)
        self.locations = tuple(locations)
        self.initial = tuple(initial)
        self.final = tuple(final)
        self.rules = tuple(rules)
        self.orbitised = orbitised
        self.lint_unsat = tuple(lint_unsat)
        locset = set(self.locations)
        if len(locset) != len(self.locations):
            raise AutomatonError("duplicate location declaration")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise AutomatonError("duplicate alphabet symbol")
        for loc in self.initial + self.final:
            if loc not in locset:
                raise AutomatonError(f"undeclared location {loc!r}")
        symset = set(self.alphabet)
        for r in self.rules:
            if r.src not in locset or r.dst not in locset:
                raise AutomatonError(f"rule references undeclared location: {r.render()}")
            if r.sym not in symset:
                raise AutomatonError(f"rule references undeclared symbol: {r.render()}")
        self._loc_index = {loc: i for i, loc in enumerate(self.locations)}
        self._sym_index = {s: i for i, s in enumerate(self.alphabet)}
        self._rules_from = {}
        for i, r in enumerate(self.rules):
            self._rules_from.setdefault(r.src, []).append((i, r))

    def rules_from(self, loc):
        return self._rules_from.get(loc, [])

    def initial_configurations(self):
        return [Configuration(p, (None,) * self.d) for p in self.initial]

    def __repr__(self):
        return f"<RegisterAutomaton d={self.d} |L|={len(self.locations)} |rules|={len(self.rules)}>"


def parse_automaton(text):
    headers = {}
    rule_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw in ('registers', 'alphabet', 'locations', 'initial', 'final'):
            if kw in headers:
                raise AutomatonSyntaxError(f"duplicate '{kw}' declaration", line=lineno)
            headers[kw] = (parts[1:], lineno)
        elif kw == 'rule':
            rule_lines.append((line, lineno))
        else:
            raise AutomatonSyntaxError(f"unknown directive {kw!r}", line=lineno)
    for kw in ('registers', 'alphabet', 'locations', 'initial', 'final'):
        if kw not in headers:
            raise AutomatonSyntaxError(f"missing '{kw}' declaration")
    regs, lineno = headers['registers']
    if len(regs) != 1 or not regs[0].isdigit():
        raise AutomatonSyntaxError("registers expects one natural number", line=lineno)
    d = int(regs[0])
    rules = []
    for line, lineno in rule_lines:
        first_quote = line.find('"')
        if first_quote < 0 or not line.endswith('"') or first_quote == len(line) - 1:
            raise AutomatonSyntaxError('rule expects a quoted constraint', line=lineno)
        head = line[:first_quote].split()
        if len(head) != 4:
            raise AutomatonSyntaxError("rule expects: rule <src> <sym> <dst> \"<constraint>\"",
                                       line=lineno)
        _, src, sym, dst = head
        ctext = line[first_quote + 1:-1]
        try:
            c = parse_constraint(ctext, d)
        except AutomatonSyntaxError as e:
            raise AutomatonSyntaxError(str(e), line=lineno) from None
        rules.append(Rule(src, sym, dst, c))
    try:
        return RegisterAutomaton(
            d=d,
            alphabet=headers['alphabet'][0],
            locations=headers['locations'][0],
            initial=headers['initial'][0],
            final=headers['final'][0],
            rules=rules,
        )
    except AutomatonError as e:
        raise AutomatonSyntaxError(str(e)) from None


def serialize(a):
    """Canonical text form; rules sorted by (src, sym, dst, constraint)."""
    lines = [
        f"registers {a.d}",
        "alphabet " + " ".join(a.alphabet),
        "locations " + " ".join(a.locations),
        "initial " + " ".join(a.initial),
        "final " + " ".join(a.final),
    ]
    def key(r):
        return (a._loc_index[r.src], a._sym_index[r.sym], a._loc_index[r.dst],
                render_constraint(r.constraint))
    for r in sorted(a.rules, key=key):
        lines.append(r.render())
    return "\n".join(lines) + "\n"


def orbitise(a):
    """Split every rule into one rule per transition type it denotes."""
    rules = []
    lint = []
    for i, r in enumerate(a.rules):
        types = constraint_to_types(r.constraint, a.d)
        if not types:
            lint.append(i)
            continue
        for et in types:
            rules.append(Rule(r.src, r.sym, r.dst, constraint_of_type(et, a.d), etype=et))
    return RegisterAutomaton(a.d, a.alphabet, a.locations, a.initial, a.final,
                             rules, orbitised=True, lint_unsat=lint)


def rule_type(a, r):
    """The unique transition type of an orbitised rule (cached)."""
    if r.etype is None:
        types = constraint_to_types(r.constraint, a.d)
        if len(types) != 1:
            raise PreconditionError(
                f"rule does not denote a single orbit: {r.render()}")
        r.etype = types[0]
    return r.etype


def _step_tagged(a, config, sym, atom):
    """All (rule index, successor configuration) pairs for one input letter."""
    pool = sorted({v for v in config.val if v is not None} | {atom})
    fresh = max(pool) + 1
    candidates = [None] + pool + [fresh]
    out = []
    for i, r in a.rules_from(config.loc):
        if r.sym != sym:
            continue
        for nxt in itertools.product(candidates, repeat=a.d):
            if eval_constraint(r.constraint, config.val, atom, nxt):
                out.append((i, Configuration(r.dst, nxt)))
    return out


def step(a, config, sym, atom):
    return {c for _, c in _step_tagged(a, config, sym, atom)}


def runs_over(a, w):
    """All initial runs over the data word w (list of (symbol, atom) pairs).

    Runs are rule-tagged: runs using different rules at some step are distinct.
    """
    runs = [Run(c0, ()) for c0 in a.initial_configurations()]
    for sym, atom in w:
        nxt = []
        for run in runs:
            for i, c in _step_tagged(a, run.end, sym, atom):
                nxt.append(Run(run.start, run.steps + ((sym, atom, i, c),)))
        runs = nxt
    return runs


def accepts(a, w):
    finals = set(a.final)
    return any(r.end.loc in finals for r in runs_over(a, w))


# ---------------------------------------------------------------------------
# Semantic property checks
# ---------------------------------------------------------------------------

class Properties:
    __slots__ = ('deterministic', 'unambiguous', 'non_guessing', 'counterexamples')

    def __init__(self, deterministic, unambiguous, non_guessing, counterexamples):
        self.deterministic = deterministic
        self.unambiguous = unambiguous
        self.non_guessing = non_guessing
        # dict: property name -> witness word (tuple of (symbol, atom))
        self.counterexamples = counterexamples

    def __repr__(self):
        return (f"Properties(deterministic={self.deterministic}, "
                f"unambiguous={self.unambiguous}, non_guessing={self.non_guessing})")


def _fresh_blocks(tau, d):
    """Blocks of a transition type whose first occurrence is a next register."""
    seen = set()
    fresh = []
    for p, l in enumerate(tau.labels):
        if l == 0 or l in seen:
            continue
        seen.add(l)
        if p > d:
            fresh.append(l)
    return fresh


def _next_val(tau, d, val, atom, fresh_iter):
    out = []
    assigned = {}
    for p in range(d + 1, 2 * d + 1):
        l = tau.labels[p]
        if l == 0:
            out.append(None)
            continue
        q = tau.labels.index(l)
        if q < d:
            out.append(val[q])
        elif q == d:
            out.append(atom)
        else:
            if l not in assigned:
                assigned[l] = next(fresh_iter)
            out.append(assigned[l])
    return out


def _non_guessing_check(ao):
    d = ao.d
    start = EqualityType((0,) * d)
    src_range = range(d)
    dst_range = range(d + 1, 2 * d + 1)
    parents = {}
    queue = deque()
    for p in ao.initial:
        state = (p, start.labels)
        if state not in parents:
            parents[state] = None
            queue.append(state)
    while queue:
        loc, labels = queue.popleft()
        et = EqualityType(labels)
        for i, r in ao.rules_from(loc):
            tau = rule_type(ao, r)
            if tau.restrict(src_range) != et:
                continue
            if _fresh_blocks(tau, d):
                return _replay_guess_witness(ao, parents, (loc, labels), i)
            target = tau.restrict(dst_range)
            state = (r.dst, target.labels)
            if state not in parents:
                parents[state] = ((loc, labels), i)
                queue.append(state)
    return None


def _replay_guess_witness(ao, parents, state, last_rule):
    path = [last_rule]
    while parents[state] is not None:
        prev, i = parents[state]
        path.append(i)
        state = prev
    path.reverse()
    d = ao.d
    val = [None] * d
    mx = 0
    word = []
    for i in path:
        r = ao.rules[i]
        tau = rule_type(ao, r)
        yblock = tau.labels[d]
        q = tau.labels.index(yblock)
        atom = val[q] if q < d else mx + 1
        mx = max(mx, atom)
        counter = itertools.count(mx + 1)
        val = _next_val(tau, d, val, atom, counter)
        mx = max([mx] + [v for v in val if v is not None])
        word.append((r.sym, atom))
    return tuple(word)


def _self_product(ao):
    """BFS over pairs of runs; returns (determinism witness, ambiguity witness)."""
    d = ao.d
    src_range = range(d)
    finals = set(ao.final)
    parents = {}
    queue = deque()
    det_witness = None
    amb_witness = None

    def visit(state, parent):
        nonlocal det_witness, amb_witness
        if state in parents:
            return
        parents[state] = parent
        queue.append(state)
        loc1, loc2, _, div = state
        if div and det_witness is None:
            det_witness = _replay_pair_witness(ao, parents, state)
        if div and loc1 in finals and loc2 in finals and amb_witness is None:
            amb_witness = _replay_pair_witness(ao, parents, state)

    zero = (0,) * (2 * d)
    for p in ao.initial:
        for q in ao.initial:
            visit((p, q, zero, p != q), None)

    while queue:
        state = queue.popleft()
        loc1, loc2, labels, div = state
        et = EqualityType(labels)
        rep = et.representative()
        val1, val2 = rep[:d], rep[d:]
        m = et.width
        for inp in list(range(1, m + 1)) + ['fresh']:
            atom = m + 1 if inp == 'fresh' else inp
            key1 = EqualityType.of_values(list(val1) + [atom])
            key2 = EqualityType.of_values(list(val2) + [atom])
            for i1, r1 in ao.rules_from(loc1):
                tau1 = rule_type(ao, r1)
                if tau1.restrict(range(d + 1)) != key1:
                    continue
                for i2, r2 in ao.rules_from(loc2):
                    if r2.sym != r1.sym:
                        continue
                    tau2 = rule_type(ao, r2)
                    if tau2.restrict(range(d + 1)) != key2:
                        continue
                    base = max([atom] + [v for v in rep if v is not None])
                    branches = []
                    if not div and i1 == i2:
                        branches.append(('shared', False))
                        if _fresh_blocks(tau1, d):
                            branches.append(('split', True))
                    else:
                        branches.append(('split', True))
                    for guess, div2 in branches:
                        if guess == 'shared':
                            n1 = _next_val(tau1, d, val1, atom, itertools.count(base + 1))
                            n2 = _next_val(tau2, d, val2, atom, itertools.count(base + 1))
                        else:
                            counter = itertools.count(base + 1)
                            n1 = _next_val(tau1, d, val1, atom, counter)
                            n2 = _next_val(tau2, d, val2, atom, counter)
                        labels2 = EqualityType.of_values(n1 + n2).labels
                        visit((r1.dst, r2.dst, labels2, div or div2),
                              (state, (i1, i2, inp, guess)))
    return det_witness, amb_witness


def _replay_pair_witness(ao, parents, state):
    path = []
    while parents[state] is not None:
        prev, edge = parents[state]
        path.append(edge)
        state = prev
    path.reverse()
    d = ao.d
    val1 = [None] * d
    val2 = [None] * d
    mx = 0
    word = []
    for i1, i2, inp, guess in path:
        tau1 = rule_type(ao, ao.rules[i1])
        tau2 = rule_type(ao, ao.rules[i2])
        if inp == 'fresh':
            atom = mx + 1
        else:
            distinct = []
            for v in val1 + val2:
                if v is not None and v not in distinct:
                    distinct.append(v)
            atom = distinct[inp - 1]
        mx = max(mx, atom)
        if guess == 'shared':
            n1 = _next_val(tau1, d, val1, atom, itertools.count(mx + 1))
            n2 = _next_val(tau2, d, val2, atom, itertools.count(mx + 1))
        else:
            counter = itertools.count(mx + 1)
            n1 = _next_val(tau1, d, val1, atom, counter)
            n2 = _next_val(tau2, d, val2, atom, counter)
        val1, val2 = n1, n2
        mx = max([mx] + [v for v in val1 + val2 if v is not None])
        word.append((ao.rules[i1].sym, atom))
    return tuple(word)


def check_properties(a):
    """Decide deterministic / unambiguous / non-guessing with witness words.

    Precise for non-guessing automata; for automata with guessing the
    deterministic/unambiguous answers explore one canonical guess split and
    are best-effort (guessing automata are outside the supported scope).
    """
    ao = a if a.orbitised else orbitise(a)
    guess_witness = _non_guessing_check(ao)
    det_witness, amb_witness = _self_product(ao)
    counterexamples = {}
    if det_witness is not None:
        counterexamples['deterministic'] = det_witness
    if amb_witness is not None:
        counterexamples['unambiguous'] = amb_witness
    if guess_witness is not None:
        counterexamples['non_guessing'] = guess_witness
    return Properties(
        deterministic=det_witness is None,
        unambiguous=amb_witness is None,
        non_guessing=guess_witness is None,
        counterexamples=counterexamples,
    )


# ---------------------------------------------------------------------------
# Complementation and the inclusion-to-universality reduction
# ---------------------------------------------------------------------------

def _fresh_name(base, taken):
    name = base
    while name in taken:
        name += "_"
    return name


def determinise_complement(a):
    """Complement of a deterministic orbitised automaton.

    Completes the transition function over all (registers, input) equality
    types with a rejecting sink, then swaps final and non-final locations.
    """
    if not a.orbitised:
        raise PreconditionError("determinise_complement requires an orbitised automaton")
    props = check_properties(a)
    if not props.deterministic:
        raise PreconditionError("determinise_complement requires a deterministic automaton")
    d = a.d
    mask = [True] * (d + 1)
    mask[d] = False
    xy_types = enumerate_equality_types(d + 1, mask)
    sink = _fresh_name("__sink", set(a.locations))
    rules = list(a.rules)
    covered = {}
    for r in a.rules:
        tau = rule_type(a, r)
        covered.setdefault((r.src, r.sym), set()).add(tau.restrict(range(d + 1)))
    for loc in a.locations:
        for sym in a.alphabet:
            for t in xy_types:
                if t in covered.get((loc, sym), ()):
                    continue
                labels = t.labels + (0,) * d
                et = EqualityType(labels)
                rules.append(Rule(loc, sym, sink, constraint_of_type(et, d), etype=et))
    for sym in a.alphabet:
        for t in xy_types:
            labels = t.labels + (0,) * d
            et = EqualityType(labels)
            rules.append(Rule(sink, sym, sink, constraint_of_type(et, d), etype=et))
    final = tuple(l for l in a.locations if l not in set(a.final)) + (sink,)
    return RegisterAutomaton(d, a.alphabet, a.locations + (sink,), a.initial,
                             final, rules, orbitised=True)


def find_rejected_word(a, depth):
    """A canonical word of length <= depth not accepted by a, or None.

    Breadth-first subset search over orbits of reachable configuration sets;
    exact for non-guessing automata.  Input-atom choices per state are the
    distinct register atoms present plus one atom not held in any register
    (constraints only ever compare the input with registers).
    """
    finals = set(a.final)

    def canonical(configs):
        # deterministic relabeling used only to merge orbit-equivalent states;
        # equal keys always denote orbit-equivalent sets (the relabel map is a
        # bijection), unequal keys may still be equivalent (harmless)
        ordered = sorted(configs,
                         key=lambda c: (a._loc_index[c[0]],
                                        tuple(-1 if v is None else v for v in c[1])))
        block = {}
        out = []
        for loc, val in ordered:
            row = []
            for v in val:
                if v is None:
                    row.append(0)
                else:
                    if v not in block:
                        block[v] = len(block) + 1
                    row.append(block[v])
            out.append((loc, tuple(row)))
        return tuple(out)

    start = frozenset((p, (None,) * a.d) for p in a.initial)
    seen = {canonical(start)}
    queue = deque([(start, ())])
    while queue:
        configs, word = queue.popleft()
        if not any(loc in finals for loc, _ in configs):
            return word
        if len(word) >= depth:
            continue
        atoms = sorted({v for _, val in configs for v in val if v is not None})
        mx = max([atom for _, atom in word], default=0)
        for sym in a.alphabet:
            for atom in atoms + [mx + 1]:
                succ = set()
                for loc, val in configs:
                    for _, c2 in _step_tagged(a, Configuration(loc, val), sym, atom):
                        succ.add((c2.loc, c2.val))
                key = canonical(succ)
                if key not in seen:
                    seen.add(key)
                    queue.append((frozenset(succ), word + ((sym, atom),)))
    return None


def _shift_registers(c, offset):
    kind = c[0]
    if kind == 'eq':
        return ('eq', _shift_term(c[1], offset), _shift_term(c[2], offset))
    if kind == 'not':
        return ('not', _shift_registers(c[1], offset))
    return (kind, _shift_registers(c[1], offset), _shift_registers(c[2], offset))


def _shift_term(t, offset):
    if t[0] in ('reg', 'nreg'):
        return (t[0], t[1] + offset)
    return t


def _conj(parts):
    node = parts[0]
    for p in parts[1:]:
        node = ('and', node, p)
    return node


def intersect(a, b):
    """Product automaton for the intersection; a's registers come first."""
    if set(a.alphabet) != set(b.alphabet):
        raise PreconditionError("intersection requires equal alphabets")
    d = a.d + b.d
    names = {}
    for p in a.locations:
        for q in b.locations:
            names[(p, q)] = _fresh_name(f"{p}__{q}", set(names.values()))
    locations = [names[(p, q)] for p in a.locations for q in b.locations]
    initial = [names[(p, q)] for p in a.initial for q in b.initial]
    final = [names[(p, q)] for p in a.final for q in b.final]
    rules = []
    for ra in a.rules:
        for rb in b.rules:
            if ra.sym != rb.sym:
                continue
            c = ('and', ra.constraint, _shift_registers(rb.constraint, a.d))
            rules.append(Rule(names[(ra.src, rb.src)], ra.sym,
                              names[(ra.dst, rb.dst)], c))
    return RegisterAutomaton(d, a.alphabet, locations, initial, final, rules)


def _pad_registers(a, d):
    """Extend to d registers; the new registers are pinned to bottom."""
    if a.d == d:
        return a
    extra = [('eq', ('nreg', i), ('bot',)) for i in range(a.d + 1, d + 1)]
    rules = [Rule(r.src, r.sym, r.dst, _conj([r.constraint] + extra)) for r in a.rules]
    return RegisterAutomaton(d, a.alphabet, a.locations, a.initial, a.final, rules)


def union(a, b):
    """Disjoint union; both parts are padded to a common register count."""
    if set(a.alphabet) != set(b.alphabet):
        raise PreconditionError("union requires equal alphabets")
    d = max(a.d, b.d)
    a = _pad_registers(a, d)
    b = _pad_registers(b, d)
    def rename(x, prefix):
        m = {loc: prefix + loc for loc in x.locations}
        rules = [Rule(m[r.src], r.sym, m[r.dst], r.constraint) for r in x.rules]
        return m, rules
    ma, rules_a = rename(a, "u0_")
    mb, rules_b = rename(b, "u1_")
    return RegisterAutomaton(
        d, a.alphabet,
        [ma[l] for l in a.locations] + [mb[l] for l in b.locations],
        [ma[l] for l in a.initial] + [mb[l] for l in b.initial],
        [ma[l] for l in a.final] + [mb[l] for l in b.final],
        rules_a + rules_b)


def _merge_initials(a):
    """Language-equal automaton with a single initial location."""
    if len(a.initial) == 1:
        return a
    p0 = _fresh_name("__init", set(a.locations))
    rules = list(a.rules)
    for r in a.rules:
        if r.src in set(a.initial):
            rules.append(Rule(p0, r.sym, r.dst, r.constraint, etype=r.etype))
    final = tuple(a.final)
    if set(a.initial) & set(a.final):
        final = final + (p0,)
    return RegisterAutomaton(a.d, a.alphabet, a.locations + (p0,), (p0,),
                             final, rules, orbitised=a.orbitised)


def reduce_inclusion_to_universality(a, b):
    """Automaton C with L(C) universal (over the relabelled alphabet) iff
    L(a) is included in L(b).

    The alphabet of C has one letter per rule of a; a is relabelled into a
    deterministic automaton A', b is lifted along the letter-to-symbol
    homomorphism into B', and C = (B' intersect A') union complement(A').
    """
    if not a.orbitised:
        raise PreconditionError("inclusion reduction: left automaton is not orbitised")
    if set(a.alphabet) != set(b.alphabet):
        raise PreconditionError("inclusion reduction: alphabets differ")
    props_a = check_properties(a)
    if not props_a.non_guessing:
        raise PreconditionError("inclusion reduction: left automaton is guessing")
    props_b = check_properties(b)
    if not props_b.unambiguous:
        raise PreconditionError("inclusion reduction: right automaton is ambiguous")
    if not props_b.non_guessing:
        raise PreconditionError("inclusion reduction: right automaton is guessing")

    a = _merge_initials(a)
    letters = [f"t{i}" for i in range(len(a.rules))]
    a_rules = [Rule(r.src, letters[i], r.dst, r.constraint, etype=r.etype)
               for i, r in enumerate(a.rules)]
    a_prime = RegisterAutomaton(a.d, letters, a.locations, a.initial, a.final,
                                a_rules, orbitised=True)
    b_rules = []
    for rb in b.rules:
        for i, ra in enumerate(a.rules):
            if ra.sym == rb.sym:
                b_rules.append(Rule(rb.src, letters[i], rb.dst, rb.constraint))
    b_prime = RegisterAutomaton(b.d, letters, b.locations, b.initial, b.final, b_rules)

    part1 = orbitise(intersect(b_prime, a_prime))
    part2 = determinise_complement(a_prime)
    return orbitise(union(part1, part2))
