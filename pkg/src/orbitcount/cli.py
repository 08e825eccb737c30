"""Command-line front-end: property checks, counting systems, table
evaluation, oracle comparison, cancelling relations, and decision verdicts.

Exit codes: 0 = property holds / command succeeded, 1 = property fails,
2 = usage or parse error, 3 = precondition violation.
"""

import argparse
import json
import sys

from .automata import (AutomatonError, PreconditionError, accepts,
                       check_properties, find_rejected_word, orbitise,
                       parse_automaton, reduce_inclusion_to_universality)
from .counting import (build_counting_system, canonical_words, evaluate,
                       oracle_table, pair_names, system_to_json, table_to_csv,
                       _frac_str)
from .zeroness import (decide_zeroness, elimination_relation, hnf_relation,
                       hnf_zeroness_backend)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3


class UsageError(Exception):
    pass


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=['text', 'json'], default='text')
    common.add_argument('--backend', choices=['elim', 'hnf'], default='elim')
    common.add_argument('--seed', type=int, default=20240801,
                        help='seed for randomized helpers (reserved)')
    common.add_argument('--max-n', type=int, default=7, dest='max_n')
    common.add_argument('--max-k', type=int, default=7, dest='max_k')

    p = argparse.ArgumentParser(
        prog='orbitcount',
        description='decision procedures for unambiguous register automata '
                    'over equality data via orbit counting')
    sub = p.add_subparsers(dest='cmd', required=True)

    c = sub.add_parser('check', parents=[common],
                       help='decide universality / inclusion / equivalence')
    c.add_argument('kind', choices=['universality', 'inclusion', 'equivalence'])
    c.add_argument('files', nargs='+')

    pr = sub.add_parser('props', parents=[common],
                        help='semantic property report')
    pr.add_argument('file')

    li = sub.add_parser('linrec', parents=[common],
                        help='emit the orbit-counting system')
    li.add_argument('file')

    ev = sub.add_parser('eval', parents=[common],
                        help='evaluate the counting table')
    ev.add_argument('file')
    ev.add_argument('--n', type=int, default=7)
    ev.add_argument('--k', type=int, default=7)
    ev.add_argument('--var', default=None)

    cr = sub.add_parser('cr', parents=[common],
                        help='emit a cancelling relation')
    cr.add_argument('file')
    cr.add_argument('--target', default='G')

    orc = sub.add_parser('oracle', parents=[common],
                         help='brute-force orbit counts')
    orc.add_argument('file')

    ver = sub.add_parser('verify', parents=[common],
                         help='cross-check the counting table against the '
                              'brute-force oracle')
    ver.add_argument('file')
    return p


def _load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return parse_automaton(text)


def _countable(a):
    """Orbitised version of an automaton meeting the counting preconditions."""
    props = check_properties(a)
    if not props.non_guessing:
        raise PreconditionError("automaton uses guessing")
    if not props.unambiguous:
        raise PreconditionError("automaton is not unambiguous")
    return a if a.orbitised else orbitise(a)


def _word_text(word):
    if not word:
        return '<empty word>'
    return ' '.join(f"{sym}({atom})" for sym, atom in word)


def _word_json(word):
    return None if word is None else [[sym, atom] for sym, atom in word]


def _universality_verdict(a, backend):
    """Zeroness verdict for the rejected-word count, plus a reconstructed
    counterexample word when the bounded search finds one."""
    cs = build_counting_system(_countable(a))
    decide = hnf_zeroness_backend if backend == 'hnf' else decide_zeroness
    verdict = decide(cs, 'G')
    word = None
    if not verdict.is_zero:
        word = find_rejected_word(a, verdict.witness[0])
    return verdict, word


def _report_check(name, verdict, word, fmt):
    if fmt == 'json':
        doc = {'check': name, 'holds': verdict.is_zero,
               'verdict': verdict.to_json(),
               'counterexample': _word_json(word)}
        print(json.dumps(doc, indent=2))
    elif verdict.is_zero:
        print(f"{name} holds")
    else:
        n, k, _ = verdict.witness
        print(f"{name} fails: {verdict.render()}")
        if word is None:
            print(f"witness at ({n},{k}) without reconstructed word")
        else:
            print(f"counterexample: {_word_text(word)}")
    return EXIT_OK if verdict.is_zero else EXIT_FAIL


def _inclusion_counterexample(a, b, depth):
    """Shortest canonical word accepted by a but not b, searching lengths up
    to the grid witness; None when the bounded search finds nothing."""
    for n in range(depth + 1):
        for w in canonical_words(a.alphabet, n):
            if accepts(a, w) and not accepts(b, w):
                return w
    return None


def _inclusion_verdict(a, b, backend):
    red = reduce_inclusion_to_universality(
        a if a.orbitised else orbitise(a), b)
    cs = build_counting_system(_countable(red))
    decide = hnf_zeroness_backend if backend == 'hnf' else decide_zeroness
    verdict = decide(cs, 'G')
    word = None
    if not verdict.is_zero:
        word = _inclusion_counterexample(a, b, verdict.witness[0])
    return verdict, word


def cmd_check(args):
    kind = args.kind
    want = {'universality': 1, 'inclusion': 2, 'equivalence': 2}[kind]
    if len(args.files) != want:
        raise UsageError(f"check {kind} takes exactly {want} file(s)")
    if kind == 'universality':
        a = _load(args.files[0])
        verdict, word = _universality_verdict(a, args.backend)
        return _report_check('universality', verdict, word, args.format)
    a = _load(args.files[0])
    b = _load(args.files[1])
    if kind == 'inclusion':
        verdict, word = _inclusion_verdict(a, b, args.backend)
        return _report_check('inclusion', verdict, word, args.format)
    # equivalence: two inclusions
    for left, right, tag in ((a, b, 'left in right'), (b, a, 'right in left')):
        verdict, word = _inclusion_verdict(left, right, args.backend)
        if not verdict.is_zero:
            return _report_check(f"equivalence ({tag})", verdict, word,
                                 args.format)
    return _report_check('equivalence', verdict, None, args.format)


def cmd_props(args):
    props = check_properties(_load(args.file))
    flags = [('deterministic', props.deterministic),
             ('unambiguous', props.unambiguous),
             ('non_guessing', props.non_guessing)]
    if args.format == 'json':
        doc = {name: value for name, value in flags}
        doc['counterexamples'] = {name: _word_json(w) for name, w
                                  in props.counterexamples.items()}
        print(json.dumps(doc, indent=2))
    else:
        print(' '.join(f"{name}={'true' if value else 'false'}"
                       for name, value in flags))
    return EXIT_OK


def _render_op_terms(op, var):
    parts = []
    for poly, point in ((op.p00, f"{var}(n,k)"), (op.p01, f"{var}(n+1,k)"),
                        (op.p10, f"{var}(n,k+1)")):
        if not poly.is_zero():
            parts.append(f"({poly.render()})*{point}")
    return parts


def cmd_linrec(args):
    cs = build_counting_system(_countable(_load(args.file)))
    if args.format == 'json':
        print(json.dumps(system_to_json(cs), indent=2))
        return EXIT_OK
    print('variables: ' + ' '.join(cs.variables))
    for i, v in enumerate(cs.variables):
        parts = []
        for j, w in enumerate(cs.variables):
            parts.extend(_render_op_terms(cs.matrix[i][j], w))
        print(f"{v}(n+1,k+1) = " + (' + '.join(parts) if parts else '0'))
    for v in cs.variables:
        b00, b0k, bn0 = cs.boundaries[v]
        print(f"boundary {v}: f(0,0)={_frac_str(b00)} "
              f"f(0,k)={_frac_str(b0k)} f(n,0)={_frac_str(bn0)}")
    for name, combo in cs.derived:
        terms = ' + '.join(f"({_frac_str(c)})*{v}" for v, c in combo.items())
        print(f"derived {name} = {terms}")
    return EXIT_OK


def cmd_eval(args):
    cs = build_counting_system(_countable(_load(args.file)))
    table = evaluate(cs, args.n, args.k)
    variables = None
    if args.var is not None:
        if args.var not in table.names():
            raise UsageError(f"unknown variable {args.var!r}; "
                             f"have {' '.join(table.names())}")
        variables = [args.var]
    if args.format == 'json':
        names = variables if variables is not None else table.names()
        doc = {'N': table.N, 'K': table.K,
               'values': {v: [[_frac_str(table.get(v, n, k))
                               for k in range(table.K + 1)]
                              for n in range(table.N + 1)] for v in names}}
        print(json.dumps(doc, indent=2))
    else:
        sys.stdout.write(table_to_csv(table, variables))
    return EXIT_OK


def cmd_cr(args):
    cs = build_counting_system(_countable(_load(args.file)))
    if args.target not in cs.all_names():
        raise UsageError(f"unknown variable {args.target!r}; "
                         f"have {' '.join(cs.all_names())}")
    relation = hnf_relation if args.backend == 'hnf' else elimination_relation
    rel = relation(cs, args.target)
    if args.format == 'json':
        print(json.dumps(rel.to_json(), indent=2))
    else:
        print(rel.render())
    return EXIT_OK


def cmd_oracle(args):
    a = _load(args.file)
    counts, accepted = oracle_table(a, args.max_n, args.max_k)
    names, ordered_pairs, _ = pair_names(a if a.orbitised else orbitise(a))
    rows = []
    for pair in ordered_pairs:
        tab = counts.get(pair, {})
        for n in range(args.max_n + 1):
            for k in range(args.max_k + 1):
                rows.append((names[pair], n, k, tab.get((n, k), 0)))
    for n in range(args.max_n + 1):
        for k in range(args.max_k + 1):
            rows.append(('accepted', n, k, accepted.get((n, k), 0)))
    if args.format == 'json':
        doc = {'max_n': args.max_n, 'max_k': args.max_k,
               'counts': [{'var': v, 'n': n, 'k': k, 'count': c}
                          for v, n, k, c in rows]}
        print(json.dumps(doc, indent=2))
    else:
        print('var,n,k,count')
        for v, n, k, c in rows:
            print(f"{v},{n},{k},{c}")
    return EXIT_OK


def cmd_verify(args):
    a = _load(args.file)
    ao = _countable(a)
    cs = build_counting_system(ao)
    N, K = args.max_n, args.max_k
    table = evaluate(cs, N, K)
    counts, accepted = oracle_table(ao, N, K, check=False)
    names, ordered_pairs, _ = pair_names(ao)
    mismatches = []
    for pair in ordered_pairs:
        v = names[pair]
        tab = counts.get(pair, {})
        for n in range(N + 1):
            for k in range(K + 1):
                got = table.get(v, n, k)
                want = tab.get((n, k), 0)
                if got != want:
                    mismatches.append((v, n, k, got, want))
    for n in range(N + 1):
        for k in range(K + 1):
            got = table.get('G', n, k)
            want = table.get('S', n, k) - accepted.get((n, k), 0)
            if got != want:
                mismatches.append(('G', n, k, got, want))
    ok = not mismatches
    if args.format == 'json':
        doc = {'max_n': N, 'max_k': K, 'agrees': ok,
               'mismatches': [{'var': v, 'n': n, 'k': k,
                               'linrec': _frac_str(g), 'oracle': _frac_str(w)}
                              for v, n, k, g, w in mismatches[:20]]}
        print(json.dumps(doc, indent=2))
    elif ok:
        print(f"linrec table agrees with the oracle for n<={N} k<={K}")
    else:
        print(f"disagreement at {len(mismatches)} grid point(s):")
        for v, n, k, g, w in mismatches[:20]:
            print(f"  {v}({n},{k}): linrec={_frac_str(g)} oracle={_frac_str(w)}")
    return EXIT_OK if ok else EXIT_FAIL


_COMMANDS = {
    'check': cmd_check,
    'props': cmd_props,
    'linrec': cmd_linrec,
    'eval': cmd_eval,
    'cr': cmd_cr,
    'oracle': cmd_oracle,
    'verify': cmd_verify,
}


def run(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.cmd](args)
    except PreconditionError as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (UsageError, AutomatonError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
