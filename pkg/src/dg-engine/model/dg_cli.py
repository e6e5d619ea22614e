#!/bin/python
"""Command line front end: every verb loads a document and runs one library operation."""
import argparse
import json
import logging
import os
import shlex
import sys

from dg_algebra import algebra_homology, check_homomorphism, validate_algebra
from dg_config import engine_config, use_config
from dg_errors import DgError, LanguageError
from dg_homtensor import tensor_modules
from dg_model import Dg
from dg_module import (as_bimodule, check_morphism, cone, hom_complex, homology_dims, homology_module, is_acyclic,
                       validate_module)
from dg_perfect import Leaf, base_change_eta, dual_left, dual_right, duality_check, realize_semifree
from dg_textformat import load_workspace, module_section, print_section

log = logging.getLogger(__name__)


def yes_no(flag):
    return 'yes' if flag else 'no'


def table(d):
    return {str(n): v for n, v in sorted(d.items())}


def _window_table(table_, window):
    if window is None:
        return {}
    lo, hi = window
    return {n: table_.get(n, 0) for n in range(lo, hi + 1)}


def _violations(report):
    return [{'law': v.law, 'witness': list(v.witness), 'detail': v.detail} for v in report]


def _object(args, ws):
    """The module a verb works on: --module, --tree or an inline --semifree description."""
    if getattr(args, 'semifree', None):
        tree = ws.semifree_from_text(args.semifree, args.algebra)
        return realize_semifree(tree).module, tree
    if getattr(args, 'tree', None):
        return ws.realized(args.tree).module, ws.trees[args.tree]
    if getattr(args, 'module', None):
        return ws.module(args.module, args.algebra), None
    raise LanguageError('name a module with --module, --tree or --semifree')


def cmd_validate(args, ws):
    reports = {}
    for name, a in ws.algebras.items():
        reports[name] = validate_algebra(a)
    for name, iota in ws.homomorphisms.items():
        reports[name] = check_homomorphism(iota)
    for name, m in ws.modules.items():
        reports[name] = validate_module(m)
    for name, f in ws.morphisms.items():
        reports[name] = check_morphism(f)
    if args.name:
        missing = [name for name in args.name if name not in reports]
        if missing:
            raise LanguageError(f'nothing named {", ".join(missing)} in {ws.document.origin}')
        reports = {name: reports[name] for name in args.name}
    ok = not any(reports.values())
    if not ok:
        log.warning(f'{ws.document.origin}: {sum(len(r) for r in reports.values())} violations')
    lines = [f'{name}: {v}' for name, report in reports.items() for v in report]
    return ok, {'valid': ok, 'violations': {name: _violations(r) for name, r in reports.items()}}, \
        'valid' if ok else '\n'.join(lines)


def cmd_homology(args, ws):
    if args.module:
        m = ws.module(args.module, args.algebra)
        name, rows = m.name, _window_table(homology_dims(m), m.window())
    else:
        a = ws.algebra(args.algebra)
        name, rows = a.name, _window_table(algebra_homology(a), a.space.window)
    report = {'object': name, 'homology': table(rows)}
    lines = [f'H^{n} {d}' for n, d in rows.items()]
    if args.action:
        if not args.module:
            raise LanguageError('--action needs --module')
        action = homology_module(m, with_action=True).action
        report['action'] = [{'class': list(z), 'by': list(alpha),
                             'value': {f'{n}:{r}': m.field.format(c) for (n, r), c in sorted(value.items())}}
                            for (z, alpha), value in sorted(action.items())]
        for entry in report['action']:
            value = ' + '.join(f'{c}*[{k}]' for k, c in entry['value'].items())
            lines.append(f'[{entry["class"][0]}:{entry["class"][1]}].[{entry["by"][0]}:{entry["by"][1]}] = {value}')
    return True, report, '\n'.join(lines)


def cmd_hom(args, ws):
    source, target = ws.module(args.source, args.algebra), ws.module(args.target, args.algebra)
    hom = hom_complex(source, target)
    dims, homology = hom.dims(), hom.homology()
    rows = sorted(set(dims) | set(homology))
    lines = [f'HOM^{n} {dims.get(n, 0)} H^{n} {homology.get(n, 0)}' for n in rows]
    return True, {'dims': table(dims), 'homology': table(homology)}, '\n'.join(lines)


def _module_report(m, extra=None):
    report = {'dims': table({n: m.space.dim(n) for n in m.space.degrees}),
              'homology': table(_window_table(homology_dims(m), m.window())),
              'module': print_section(module_section(m))}
    report.update(extra or {})
    return report


def cmd_tensor(args, ws):
    _, module = tensor_modules(ws.module(args.left, args.algebra), ws.module(args.right, args.algebra))
    return True, _module_report(module), print_section(module_section(module)).rstrip('\n')


def cmd_cone(args, ws):
    module = cone(ws.morphism(args.morphism)).module
    acyclic = is_acyclic(module)
    text = print_section(module_section(module)) + f'acyclic: {yes_no(acyclic)}'
    return True, _module_report(module, {'acyclic': acyclic}), text


def cmd_dualize(args, ws):
    m, _ = _object(args, ws)
    if m.side == 'right':
        _, dual = dual_right(m)
    elif m.side == 'left':
        _, dual = dual_left(m)
    else:
        raise LanguageError(f'{m.name} is a bimodule; dualize takes a one-sided module')
    return True, _module_report(dual), print_section(module_section(dual)).rstrip('\n')


def cmd_duality_check(args, ws):
    m, _ = _object(args, ws)
    certificate = duality_check(m)
    lines = [f'reflexive: {yes_no(certificate.reflexive)}', f'chain map: {yes_no(certificate.chain_map)}',
             f'quasi-isomorphism: {yes_no(certificate.quasi_iso)}',
             f'isomorphism: {yes_no(certificate.isomorphism)}']
    return certificate.reflexive, certificate.to_dict(), '\n'.join(lines)


def cmd_adjunction_check(args, ws):
    check = Dg.resolve_adjunction(args.kind)
    if args.kind == 'lambda':
        if len(args.objects) != 2:
            raise LanguageError(f'lambda takes a homomorphism and a module, got {len(args.objects)} names')
        iota = ws.homomorphism(args.objects[0])
        certificate = check(iota, ws.module(args.objects[1], iota.target.name))
        valid = certificate.valid
        lines = [f'valid: {yes_no(valid)}', f'mutual inverse: {yes_no(certificate.mutual_inverse)}',
                 f'chain map: {yes_no(certificate.chain_map)}']
    else:
        if len(args.objects) != 3:
            raise LanguageError(f'{args.kind} takes three modules, got {len(args.objects)} names')
        modules = [as_bimodule(ws.module(ref, args.algebra)) for ref in args.objects]
        certificate = check(*modules, seed=args.seed)
        valid = certificate.valid
        lines = [f'valid: {yes_no(valid)}', f'bijective: {yes_no(certificate.bijective)}',
                 f'natural: {yes_no(certificate.natural_first and certificate.natural_second)}',
                 f'differential: {yes_no(certificate.differential_compatible)}']
        if certificate.inverse_ok is not None:
            lines.append(f'inverse: {yes_no(certificate.inverse_ok)}')
        lines += [f'  {w}' for w in certificate.witness]
    return valid, certificate.to_dict(), '\n'.join(lines)


def cmd_base_change_check(args, ws):
    iota = ws.homomorphism(args.homomorphism)
    if args.algebra is None:
        args.algebra = iota.source.name
    m, tree = _object(args, ws)
    representable = None
    if tree is not None and len(tree.nodes) == 1 and isinstance(tree.nodes[0], Leaf) and tree.nodes[0].shift == 0:
        representable = tree.nodes[0].idempotent
    report = base_change_eta(iota, m, representable)
    lines = [f'valid: {yes_no(report.valid)}', f'chain map: {yes_no(report.chain_map)}',
             f'quasi-isomorphism: {yes_no(report.quasi_iso)}', f'isomorphism: {yes_no(report.isomorphism)}']
    if report.factorization is not None:
        lines.append(f'factorization: {yes_no(report.factorization)}')
    return report.valid, report.to_dict(), '\n'.join(lines)


def cmd_semifree_realize(args, ws):
    m, tree = _object(args, ws)
    realization = realize_semifree(tree)
    text = '\n'.join(realization.certificate) + '\n' + print_section(module_section(m)).rstrip('\n')
    return True, _module_report(m, {'tree': tree.describe(), 'certificate': realization.certificate}), text


def _check_tokens(spec, origin):
    base = os.path.dirname(origin)
    tokens = shlex.split(spec.args)
    return [os.path.join(base, t) if t.endswith('.dg') and not os.path.exists(t) else t for t in tokens]


def cmd_check(args, ws):
    names = args.name or list(ws.checks)
    ok, reports, lines = True, {}, []
    for name in names:
        if name not in ws.checks:
            raise LanguageError(f'no check named {name} in {ws.document.origin}')
        spec = ws.checks[name]
        if spec.verb == 'check':
            raise LanguageError(f'check {name} may not run other checks', spec.line)
        try:
            sub = build_parser().parse_args([spec.verb] + _check_tokens(spec, ws.document.origin))
        except SystemExit:
            raise LanguageError(f'check {name} has unusable arguments: {spec.args}', spec.line) from None
        sub.seed, sub.format = args.seed, args.format
        passed, report, text = dispatch(sub)
        ok = ok and passed
        reports[name] = {'ok': passed, 'report': report}
        lines.append(f'[{name}] {"ok" if passed else "FAIL"}')
        lines += [f'  {line}' for line in text.splitlines()]
    return ok, {'checks': reports}, '\n'.join(lines)


HANDLERS = {
    'validate': cmd_validate,
    'homology': cmd_homology,
    'hom': cmd_hom,
    'tensor': cmd_tensor,
    'cone': cmd_cone,
    'dualize': cmd_dualize,
    'duality-check': cmd_duality_check,
    'adjunction-check': cmd_adjunction_check,
    'base-change-check': cmd_base_change_check,
    'semifree-realize': cmd_semifree_realize,
    'check': cmd_check,
}


def _object_args(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument('--module', help='module section name or builtin (regular, rep:<idem>, ...)')
    group.add_argument('--tree', help='[semifree] section name')
    group.add_argument('--semifree', help='inline tree lines separated by ";", e.g. "leaf 1 0"')


def build_parser():
    parser = argparse.ArgumentParser(prog='dg-engine', description='Exact computations with dg algebras and modules')
    parser.add_argument('--format', choices=['text', 'machine'], default='text')
    parser.add_argument('--seed', type=int, default=None, help='seed of the randomized naturality panels')
    parser.add_argument('--debug', action='store_true')
    parser.add_argument('--config', default=None, help='engine configuration YAML')
    subparsers = parser.add_subparsers(dest='verb', required=True)

    def verb(name, help):
        p = subparsers.add_parser(name, help=help)
        if name == 'adjunction-check':
            p.add_argument('kind', choices=sorted(Dg.adjunction_dict))
        p.add_argument('file')
        p.add_argument('--algebra', default=None, help='algebra section for builtins and inline trees')
        return p

    p = verb('validate', 'check every law of every object in a document')
    p.add_argument('name', nargs='*')
    p = verb('homology', 'homology table of an algebra or a module')
    p.add_argument('--module', default=None)
    p.add_argument('--action', action='store_true', help='also print the H(A)-action on H(M)')
    p = verb('hom', 'the Hom-complex between two modules')
    p.add_argument('source')
    p.add_argument('target')
    p = verb('tensor', 'U (x)_B X')
    p.add_argument('left')
    p.add_argument('right')
    p = verb('cone', 'cone of a chain map')
    p.add_argument('morphism')
    _object_args(verb('dualize', 'HOM_A(M, A) of a one-sided module'))
    _object_args(verb('duality-check', 'is the evaluation into the double dual a quasi-isomorphism'))
    p = verb('adjunction-check', 'certificate of the eta, xi or lambda isomorphism')
    p.add_argument('objects', nargs='+')
    p = verb('base-change-check', 'base change of duals along a homomorphism')
    p.add_argument('homomorphism')
    _object_args(p)
    _object_args(verb('semifree-realize', 'explicit module of a semi-free tree'))
    p = verb('check', 'run the [check] sections of a document')
    p.add_argument('name', nargs='*')
    return parser


def dispatch(args):
    ws = load_workspace(args.file)
    return HANDLERS[args.verb](args, ws)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code or 0
    try:
        if args.config:
            use_config(args.config)
        config = engine_config()
    except (OSError, ValueError, KeyError) as error:
        print(f'[error] configuration: {error}', file=sys.stderr)
        return 2
    level = logging.DEBUG if args.debug else config.log_level
    logging.basicConfig(level=level, format=config.log_format, force=True)
    try:
        ok, report, text = dispatch(args)
    except LanguageError as error:
        print(f'[error] {args.file}: {error}', file=sys.stderr)
        return 2
    except OSError as error:
        print(f'[error] {error}', file=sys.stderr)
        return 2
    except DgError as error:
        print(f'[rejected] {error}', file=sys.stderr)
        return 1
    if args.format == 'machine':
        report = dict(report, verb=args.verb, ok=ok)
        print(json.dumps(report, sort_keys=True, indent=2))
    elif text:
        print(text)
    log.debug(f'{args.verb} finished, ok={ok}')
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
