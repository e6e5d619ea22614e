"""Line-oriented text format for algebras, modules, maps, semi-free trees and checks.

A document is a list of sections ``[kind NAME]`` followed by entry lines; a
section without a name gets the default name of its kind::

    [algebra D]
    field = Q
    idempotents = e
    basis e : 0 : e : e
    basis a : 0 : e : e
    basis b : 1 : e : e
    diff a = b

``parse_document`` turns text into a ``SourceDocument`` (syntax only),
``build_objects`` resolves it into algebras, modules and maps, and
``print_document`` writes the canonical form back.
"""
import logging
from dataclasses import dataclass, field as dc_field
from typing import Optional

import lark
from sympy import QQ

from dg_algebra import AlgebraHom, BasisElement, DgAlgebra
from dg_config import engine_config
from dg_errors import DgError, LanguageError
from dg_linalg import Field
from dg_module import (DgModule, DgMorphism, ModuleElement, left_representable, regular_bimodule, regular_left,
                       regular_right, representable)
from dg_perfect import ConeNode, Leaf, SemifreeTree, realize_semifree

log = logging.getLogger(__name__)

grammar = r"""
start: _NL* section*

section: header _NL+ entry*
header: "[" KIND [LABEL] "]"

entry: (setting | basis | mul | act | lact | diff | image | map | leaf | cone) _NL+

setting: KEY "=" REST
basis: "basis" LABEL ":" SIGNED ":" idem ":" idem
idem: LABEL | NEG
mul: "mul" LABEL "." LABEL "=" lincomb
act: "act" LABEL "." LABEL "=" lincomb
lact: "lact" LABEL "." LABEL "=" lincomb
diff: "diff" LABEL "=" lincomb
image: "image" LABEL "=" lincomb
map: "map" LABEL "=" lincomb
leaf: "leaf" (LABEL | INT) SIGNED
cone: "cone" INT INT "over" LABEL

lincomb: [NEG] summand addend*
addend: (PLUS | NEG) summand
summand: NUMBER "*" LABEL   -> scaled
       | LABEL              -> plain
       | NUMBER             -> bare

KIND: "algebra" | "module" | "homomorphism" | "morphism" | "semifree" | "check"
KEY: /[a-z_]+/
REST: /[^\s#][^\n#]*/
LABEL: /[A-Za-z_<][A-Za-z0-9_<>|~'^]*/
NUMBER: /\d+(\/\d+)?/
SIGNED: /[+-]?\d+/
INT: /\d+/
PLUS: "+"
NEG: "-"

COMMENT: /#[^\n]*/
_NL: /(\r?\n[\t ]*)+/

%ignore /[\t \f]+/
%ignore COMMENT
"""

DEFAULT_NAMES = {
    'algebra': 'A',
    'module': 'M',
    'homomorphism': 'iota',
    'morphism': 'f',
    'semifree': 'P',
    'check': 'check',
}

SECTION_KEYS = {
    'algebra': ('field', 'idempotents'),
    'module': ('side', 'algebra', 'left_algebra', 'right_algebra'),
    'homomorphism': ('source', 'target'),
    'morphism': ('source', 'target', 'degree'),
    'semifree': ('algebra',),
    'check': ('verb', 'args'),
}

SECTION_LINES = {
    'algebra': ('setting', 'basis', 'mul', 'diff'),
    'module': ('setting', 'basis', 'act', 'lact', 'diff'),
    'homomorphism': ('setting', 'image'),
    'morphism': ('setting', 'map'),
    'semifree': ('setting', 'leaf', 'cone'),
    'check': ('setting',),
}


@dataclass(frozen=True)
class Term:
    label: Optional[str]
    coefficient: object
    line: int = dc_field(default=0, compare=False)
    column: int = dc_field(default=0, compare=False)


@dataclass(frozen=True)
class Entry:
    kind: str
    args: tuple
    line: int = dc_field(default=0, compare=False)
    column: int = dc_field(default=0, compare=False)


@dataclass
class Section:
    kind: str
    name: str
    entries: list
    line: int = dc_field(default=0, compare=False)
    named: bool = dc_field(default=True, compare=False)

    def lines(self, kind):
        return [entry for entry in self.entries if entry.kind == kind]


@dataclass
class SourceDocument:
    sections: list
    origin: str = dc_field(default='<string>', compare=False)

    def section(self, name):
        for section in self.sections:
            if section.name == name:
                return section
        raise KeyError(name)


def _rational(token):
    num, _, den = str(token).partition('/')
    if den and int(den) == 0:
        raise LanguageError(f'{token} has a zero denominator', token.line, token.column)
    return QQ(int(num), int(den or 1))


def _summand(node, negative):
    children = node.children
    if node.data == 'scaled':
        number, label = children
        c = _rational(number)
    elif node.data == 'plain':
        label = number = children[0]
        c = QQ(1)
    else:
        number, label = children[0], None
        c = _rational(number)
    return Term(str(label) if label is not None else None, -c if negative else c, number.line, number.column)


def _lincomb(node):
    sign, first, *rest = node.children
    terms = [_summand(first, sign is not None)]
    for addend in rest:
        op, summand = addend.children
        terms.append(_summand(summand, op == '-'))
    bare = [t for t in terms if t.label is None]
    if bare:
        if len(terms) == 1 and terms[0].coefficient == 0:
            return ()
        t = bare[0]
        raise LanguageError('a coefficient needs a basis label (write 0 for the empty combination)', t.line, t.column)
    return tuple(terms)


def _entry(node):
    meta, kind, children = node.meta, node.data, node.children
    if kind == 'setting':
        key, value = children
        args = (str(key), str(value).strip())
    elif kind == 'basis':
        label, degree, left, right = children
        args = (str(label), int(degree), *(None if idem.children[0] == '-' else str(idem.children[0])
                                         for idem in (left, right)))
    elif kind in ('mul', 'act', 'lact'):
        x, y, combo = children
        args = (str(x), str(y), _lincomb(combo))
    elif kind in ('diff', 'image', 'map'):
        x, combo = children
        args = (str(x), _lincomb(combo))
    elif kind == 'leaf':
        idempotent, shift = children
        args = (str(idempotent), int(shift))
    else:
        source, target, morphism = children
        args = (int(source), int(target), str(morphism))
    return Entry(kind, args, meta.line, meta.column)


def toast(tree, origin='<string>'):
    sections = []
    for node in tree.children:
        header, *entries = node.children
        kind, name = header.children
        named = name is not None
        name = str(name) if named else DEFAULT_NAMES[str(kind)]
        sections.append(Section(str(kind), name, [_entry(entry.children[0]) for entry in entries], kind.line, named))
    return SourceDocument(sections, origin)


def parse_document(text, origin='<string>'):
    if not text.endswith('\n'):
        text += '\n'
    try:
        tree = parse_document.parser.parse(text)
    except lark.exceptions.UnexpectedCharacters as error:
        expected = ', '.join(sorted(error.allowed or ()))
        raise LanguageError(f'unexpected character {text[error.pos_in_stream]!r}, expected one of: {expected}',
                            error.line, error.column) from None
    except lark.exceptions.UnexpectedToken as error:
        expected = ', '.join(sorted(error.expected or ()))
        found = 'end of input' if error.token.type == '$END' else repr(str(error.token))
        line = error.line if error.line > 0 else text.count('\n')
        raise LanguageError(f'unexpected {found}, expected one of: {expected}', line, max(error.column, 1)) from None
    except lark.exceptions.UnexpectedInput:
        raise LanguageError('unexpected end of input', text.count('\n'), 1) from None
    return toast(tree, origin)


parse_document.parser = lark.Lark(grammar, parser='lalr', lexer='contextual', propagate_positions=True,
                                  maybe_placeholders=True)


# Canonical printer

def format_rational(c):
    return str(c.numerator) if c.denominator == 1 else f'{c.numerator}/{c.denominator}'


def format_lincomb(terms):
    if not terms:
        return '0'
    parts = []
    for k, term in enumerate(terms):
        c = term.coefficient
        magnitude = -c if c < 0 else c
        text = term.label if magnitude == 1 else f'{format_rational(magnitude)}*{term.label}'
        if k == 0:
            parts.append(f'-{text}' if c < 0 else text)
        else:
            parts.append(f'- {text}' if c < 0 else f'+ {text}')
    return ' '.join(parts)


def format_entry(entry):
    kind, args = entry.kind, entry.args
    if kind == 'setting':
        return f'{args[0]} = {args[1]}'
    if kind == 'basis':
        label, degree, left, right = args
        return f'basis {label} : {degree} : {left or "-"} : {right or "-"}'
    if kind in ('mul', 'act', 'lact'):
        return f'{kind} {args[0]}.{args[1]} = {format_lincomb(args[2])}'
    if kind in ('diff', 'image', 'map'):
        return f'{kind} {args[0]} = {format_lincomb(args[1])}'
    if kind == 'leaf':
        return f'leaf {args[0]} {args[1]}'
    return f'cone {args[0]} {args[1]} over {args[2]}'


def print_section(section):
    header = f'[{section.kind} {section.name}]' if section.named else f'[{section.kind}]'
    return '\n'.join([header] + [format_entry(e) for e in section.entries]) + '\n'


def print_document(doc):
    return '\n'.join(print_section(section) for section in doc.sections)


# Objects -> sections

def _terms(combo, labels, field):
    terms = []
    for k, c in sorted(combo.items()):
        num, den = field.rational(c)
        terms.append(Term(labels[k], QQ(num, den)))
    return tuple(terms)


def algebra_section(a):
    idem_labels = [a.labels[e] for e in a.idempotents]
    entries = [Entry('setting', ('field', a.field.name)), Entry('setting', ('idempotents', ' '.join(idem_labels)))]
    entries += [Entry('basis', (b.label, b.degree, idem_labels[b.left], idem_labels[b.right])) for b in a.basis]
    idem_set = set(a.idempotents)
    for (i, j), value in sorted(a.mul.items()):
        if i not in idem_set and j not in idem_set:
            entries.append(Entry('mul', (a.labels[i], a.labels[j], _terms(value, a.labels, a.field))))
    for i, value in sorted(a.diff.items()):
        entries.append(Entry('diff', (a.labels[i], _terms(value, a.labels, a.field))))
    return Section('algebra', a.name, entries)


def _idem_label(algebra, position):
    if algebra is None or position is None:
        return None
    return algebra.labels[algebra.idempotents[position]]


def module_section(m, name=None):
    entries = [Entry('setting', ('side', m.side))]
    if m.side == 'bimodule':
        entries += [Entry('setting', ('left_algebra', m.left_algebra.name)),
                    Entry('setting', ('right_algebra', m.right_algebra.name))]
    else:
        entries.append(Entry('setting', ('algebra', m.algebra.name)))
    entries += [Entry('basis', (x.label, x.degree, _idem_label(m.left_algebra, x.left),
                                _idem_label(m.right_algebra, x.right))) for x in m.basis]
    if m.right_algebra is not None:
        idem_set = set(m.right_algebra.idempotents)
        for (i, a), value in sorted(m.act.items()):
            if a not in idem_set:
                entries.append(Entry('act', (m.labels[i], m.right_algebra.labels[a], _terms(value, m.labels, m.field))))
    if m.left_algebra is not None:
        idem_set = set(m.left_algebra.idempotents)
        for (a, i), value in sorted(m.lact.items()):
            if a not in idem_set:
                entries.append(Entry('lact', (m.left_algebra.labels[a], m.labels[i], _terms(value, m.labels, m.field))))
    for i, value in sorted(m.diff.items()):
        entries.append(Entry('diff', (m.labels[i], _terms(value, m.labels, m.field))))
    return Section('module', name or _section_name(m.name), entries)


def morphism_section(f, source_name, target_name, name=None):
    entries = [Entry('setting', ('source', source_name)), Entry('setting', ('target', target_name)),
               Entry('setting', ('degree', str(f.degree)))]
    for i, value in sorted(f.images.items()):
        entries.append(Entry('map', (f.source.labels[i], _terms(value, f.target.labels, f.field))))
    return Section('morphism', name or _section_name(f.name), entries)


def _section_name(name):
    cleaned = ''.join(ch if ch.isalnum() or ch in "_<>|~'^" else '_' for ch in name)
    return cleaned if cleaned[:1].isalpha() or cleaned[:1] in '_<' else f'M_{cleaned}'


# Sections -> objects

@dataclass
class CheckSpec:
    name: str
    verb: str
    args: str
    line: int = 0


@dataclass
class Workspace:
    """Everything a document defines, by section name."""
    document: SourceDocument
    algebras: dict = dc_field(default_factory=dict)
    homomorphisms: dict = dc_field(default_factory=dict)
    modules: dict = dc_field(default_factory=dict)
    morphisms: dict = dc_field(default_factory=dict)
    trees: dict = dc_field(default_factory=dict)
    checks: dict = dc_field(default_factory=dict)
    _realized: dict = dc_field(default_factory=dict, repr=False)

    def algebra(self, name=None):
        if name is None:
            if len(self.algebras) != 1:
                raise LanguageError(f'{self.document.origin} defines {len(self.algebras)} algebras; name one')
            return next(iter(self.algebras.values()))
        if name not in self.algebras:
            raise LanguageError(f'no algebra named {name} in {self.document.origin}')
        return self.algebras[name]

    def realized(self, name):
        if name not in self.trees:
            raise LanguageError(f'no semifree tree named {name} in {self.document.origin}')
        if name not in self._realized:
            self._realized[name] = realize_semifree(self.trees[name])
        return self._realized[name]

    def module(self, ref, algebra=None):
        """A module section by name, or a builtin over an algebra:
        regular, left-regular, bimodule, rep:<idem>, lrep:<idem>, tree:<name>."""
        if ref in self.modules:
            return self.modules[ref]
        kind, _, arg = ref.partition(':')
        if kind == 'tree':
            return self.realized(arg).module
        a = self.algebra(algebra)
        if ref == 'regular':
            return regular_right(a)
        if ref == 'left-regular':
            return regular_left(a)
        if ref == 'bimodule':
            return regular_bimodule(a)
        if kind in ('rep', 'lrep') and arg:
            position = _idempotent_position(a, arg, None)
            return representable(a, position) if kind == 'rep' else left_representable(a, position)
        raise LanguageError(f'no module named {ref} in {self.document.origin}')

    def document_sections(self, kind):
        return {s.name: s for s in self.document.sections if s.kind == kind}

    def homomorphism(self, name):
        if name not in self.homomorphisms:
            raise LanguageError(f'no homomorphism named {name} in {self.document.origin}')
        return self.homomorphisms[name]

    def morphism(self, name):
        if name not in self.morphisms:
            raise LanguageError(f'no morphism named {name} in {self.document.origin}')
        return self.morphisms[name]

    def semifree_from_text(self, text, algebra=None, name='P'):
        """Inline tree lines, separated by ';' or newlines, over one of the document's algebras."""
        a = self.algebra(algebra)
        body = '\n'.join(line.strip() for line in text.replace(';', '\n').splitlines() if line.strip())
        doc = parse_document(f'[semifree {name}]\nalgebra = {a.name}\n{body}\n', origin='<semifree>')
        return _build_tree(self, doc.sections[0])


def _fail(message, where):
    raise LanguageError(message, where.line, getattr(where, 'column', None) or None)


def _settings(section):
    allowed = SECTION_KEYS[section.kind]
    values, seen = {}, {}
    for entry in section.lines('setting'):
        key, value = entry.args
        if key not in allowed:
            _fail(f'{key} is not a setting of a {section.kind} section (expected one of: {", ".join(allowed)})', entry)
        if key in seen:
            _fail(f'{key} is set twice in {section.name} (lines {seen[key].line} and {entry.line})', entry)
        seen[key] = entry
        values[key] = value
    return values, seen


def _require(section, values, key):
    if key not in values:
        _fail(f'{section.kind} {section.name} needs a "{key} =" line', section)
    return values[key]


def _basis_lines(section):
    seen = {}
    for entry in section.lines('basis'):
        label = entry.args[0]
        if label in seen:
            _fail(f'duplicate basis label {label} (lines {seen[label].line} and {entry.line})', entry)
        seen[label] = entry
    return seen


def _idempotent_position(a, ref, entry):
    """Idempotent by label or 1-based index."""
    labels = [a.labels[e] for e in a.idempotents]
    if ref.isdigit():
        if not 1 <= int(ref) <= len(labels):
            message = f'{a.name} has no idempotent number {ref} (it has {len(labels)})'
            if entry is None:
                raise LanguageError(message)
            _fail(message, entry)
        return int(ref) - 1
    if ref not in labels:
        message = f'unknown idempotent {ref} of {a.name} (expected one of: {", ".join(labels)})'
        if entry is None:
            raise LanguageError(message)
        _fail(message, entry)
    return labels.index(ref)


def _combo(terms, index, degree, expected, field, what, entry):
    """Terms -> {index: scalar}, every label known and of the expected degree."""
    combo = {}
    for term in terms:
        if term.label not in index:
            raise LanguageError(f'unknown basis element {term.label} in {what}', term.line, term.column)
        k = index[term.label]
        if degree(k) != expected:
            raise LanguageError(f'degree mismatch in {what}: {term.label} has degree {degree(k)}, expected {expected}',
                                term.line, term.column)
        try:
            c = field.scalar(term.coefficient.numerator, term.coefficient.denominator)
        except ZeroDivisionError as error:
            raise LanguageError(str(error), term.line, term.column) from None
        combo[k] = combo.get(k, field.zero) + c
    return {k: c for k, c in combo.items() if c}


def _unique(table, key, entry, what):
    if key in table:
        _fail(f'{what} is given twice (lines {table[key].line} and {entry.line})', entry)
    table[key] = entry


def _check_lines(section):
    for entry in section.entries:
        if entry.kind not in SECTION_LINES[section.kind]:
            _fail(f'"{entry.kind}" lines are not allowed in a {section.kind} section', entry)


def _build_algebra(section):
    values, seen = _settings(section)
    try:
        field = Field.parse(values.get("field", engine_config().default_field))
    except ValueError as error:
        _fail(str(error), seen['field'])
    idem_labels = _require(section, values, 'idempotents').split()
    lines = _basis_lines(section)
    for label in idem_labels:
        if label not in lines:
            _fail(f'idempotent {label} has no basis line', seen['idempotents'])
    index = {label: i for i, label in enumerate(lines)}

    def position(label, entry):
        if label is None or label not in idem_labels:
            _fail(f'unknown idempotent {label or "-"} (expected one of: {", ".join(idem_labels)})', entry)
        return idem_labels.index(label)

    basis = [BasisElement(label, entry.args[1], position(entry.args[2], entry), position(entry.args[3], entry))
             for label, entry in lines.items()]
    idempotents = [index[label] for label in idem_labels]
    idem_set = set(idempotents)

    def degree(k):
        return basis[k].degree

    def lookup(label, entry):
        if label not in index:
            _fail(f'unknown basis element {label} of {section.name}', entry)
        return index[label]

    mul, diff, given = {}, {}, {}
    for entry in section.lines('mul'):
        x, y, terms = entry.args
        i, j = lookup(x, entry), lookup(y, entry)
        if i in idem_set or j in idem_set:
            _fail(f'products with idempotents are implied and must not be written ({x}.{y})', entry)
        _unique(given, ('mul', i, j), entry, f'mul {x}.{y}')
        mul[(i, j)] = _combo(terms, index, degree, degree(i) + degree(j), field, f'mul {x}.{y}', entry)
    for entry in section.lines('diff'):
        x, terms = entry.args
        i = lookup(x, entry)
        _unique(given, ('diff', i), entry, f'diff {x}')
        diff[i] = _combo(terms, index, degree, degree(i) + 1, field, f'diff {x}', entry)
    return DgAlgebra(field, basis, idempotents, mul, diff, name=section.name)


def _build_module(section, algebras):
    values, seen = _settings(section)
    side = _require(section, values, 'side')

    def algebra(key):
        name = _require(section, values, key)
        if name not in algebras:
            _fail(f'unknown algebra {name}', seen[key])
        return algebras[name]

    if side == 'right':
        left_alg, right_alg = None, algebra('algebra')
    elif side == 'left':
        left_alg, right_alg = algebra('algebra'), None
    elif side == 'bimodule':
        left_alg, right_alg = algebra('left_algebra'), algebra('right_algebra')
    else:
        _fail(f'side {side} not supported. Only right, left and bimodule are supported.', seen['side'])
    lines = _basis_lines(section)
    index = {label: i for i, label in enumerate(lines)}

    def position(alg, label, entry, which):
        if alg is None:
            if label is not None:
                _fail(f'{section.name} has no {which} algebra; write - for the {which} idempotent', entry)
            return None
        if label is None:
            _fail(f'{entry.args[0]} needs a {which} idempotent of {alg.name}', entry)
        return _idempotent_position(alg, label, entry)

    basis = [ModuleElement(label, entry.args[1], position(left_alg, entry.args[2], entry, 'left'),
                           position(right_alg, entry.args[3], entry, 'right'))
             for label, entry in lines.items()]

    def degree(k):
        return basis[k].degree

    def lookup(table, label, entry, owner):
        if label not in table:
            _fail(f'unknown basis element {label} of {owner}', entry)
        return table[label]

    act, lact, diff, given = {}, {}, {}, {}
    for kind, alg in (('act', right_alg), ('lact', left_alg)):
        for entry in section.lines(kind):
            if alg is None:
                _fail(f'{section.name} has no {"right" if kind == "act" else "left"} action', entry)
            alg_index = {label: i for i, label in enumerate(alg.labels)}
            x, y = entry.args[:2] if kind == 'act' else reversed(entry.args[:2])
            i, a = lookup(index, x, entry, section.name), lookup(alg_index, y, entry, alg.name)
            if a in alg.idempotents:
                _fail(f'actions of idempotents are implied and must not be written ({y})', entry)
            what = f'{kind} {entry.args[0]}.{entry.args[1]}'
            _unique(given, (kind, i, a), entry, what)
            combo = _combo(entry.args[2], index, degree, degree(i) + alg.degree(a), alg.field, what, entry)
            if kind == 'act':
                act[(i, a)] = combo
            else:
                lact[(a, i)] = combo
    for entry in section.lines('diff'):
        x, terms = entry.args
        i = lookup(index, x, entry, section.name)
        _unique(given, ('diff', i), entry, f'diff {x}')
        field = (right_alg or left_alg).field
        diff[i] = _combo(terms, index, degree, degree(i) + 1, field, f'diff {x}', entry)
    try:
        return DgModule(basis, right_algebra=right_alg, left_algebra=left_alg, act=act, lact=lact, diff=diff,
                        name=section.name)
    except DgError as error:
        _fail(str(error), section)


def _build_homomorphism(section, algebras):
    values, seen = _settings(section)
    ends = []
    for key in ('source', 'target'):
        name = _require(section, values, key)
        if name not in algebras:
            _fail(f'unknown algebra {name}', seen[key])
        ends.append(algebras[name])
    source, target = ends
    index = {label: i for i, label in enumerate(target.labels)}
    images, given = {}, {}
    for entry in section.lines('image'):
        x, terms = entry.args
        if x not in source.labels:
            _fail(f'unknown basis element {x} of {source.name}', entry)
        i = source.index(x)
        _unique(given, i, entry, f'image {x}')
        images[i] = _combo(terms, index, target.degree, source.degree(i), target.field, f'image {x}', entry)
    try:
        return AlgebraHom(source, target, images, name=section.name)
    except DgError as error:
        _fail(str(error), section)


def _morphism_refs(section):
    values, _ = _settings(section)
    return [values.get(key, '') for key in ('source', 'target')]


def _build_morphism(section, resolve):
    values, seen = _settings(section)
    source, target = (resolve(_require(section, values, key), seen[key]) for key in ('source', 'target'))
    try:
        degree = int(values.get('degree', '0'))
    except ValueError:
        _fail(f'degree {values["degree"]} is not an integer', seen['degree'])
    index = {label: i for i, label in enumerate(target.labels)}
    images, given = {}, {}
    for entry in section.lines('map'):
        x, terms = entry.args
        if x not in source.labels:
            _fail(f'unknown basis element {x} of {source.name}', entry)
        i = source.index(x)
        _unique(given, i, entry, f'map {x}')
        images[i] = _combo(terms, index, target.degree, source.degree(i) + degree, target.field, f'map {x}', entry)
    return DgMorphism(source, target, degree, images, name=section.name)


def _build_tree(workspace, section):
    values, seen = _settings(section)
    name = _require(section, values, 'algebra')
    if name not in workspace.algebras:
        _fail(f'unknown algebra {name}', seen['algebra'])
    a = workspace.algebras[name]
    nodes = []
    for entry in section.entries:
        if entry.kind == 'leaf':
            idempotent, shift = entry.args
            nodes.append(Leaf(_idempotent_position(a, idempotent, entry), shift))
        elif entry.kind == 'cone':
            source, target, morphism = entry.args
            if not (source < len(nodes) and target < len(nodes)):
                _fail(f'cone over nodes {source} and {target}, but only {len(nodes)} nodes precede it', entry)
            if morphism not in workspace.document_sections('morphism'):
                _fail(f'unknown morphism {morphism}', entry)
            realized = realize_semifree(SemifreeTree(a, list(nodes), section.name)).nodes

            def resolve(ref, where):
                if ref.startswith('TREE:'):
                    k = ref[len('TREE:'):]
                    if not k.isdigit() or int(k) >= len(realized):
                        _fail(f'{ref} does not name one of the {len(realized)} preceding nodes', where)
                    return realized[int(k)]
                return _module_ref(workspace, ref, where)

            f = _build_morphism(workspace.document_sections('morphism')[morphism], resolve)
            nodes.append(ConeNode(source, target, f))
    if not nodes:
        _fail(f'semifree {section.name} has no nodes', section)
    tree = SemifreeTree(a, nodes, section.name)
    try:
        realize_semifree(tree)
    except DgError as error:
        _fail(str(error), section)
    return tree


def _module_ref(workspace, ref, where):
    if ref.startswith('TREE:'):
        _fail(f'{ref} may only be used by a morphism coned over inside a semifree section', where)
    if ref not in workspace.modules:
        _fail(f'unknown module {ref}', where)
    return workspace.modules[ref]


def build_objects(doc):
    """Resolve a parsed document; every diagnostic is a LanguageError with a line."""
    names = {}
    for section in doc.sections:
        if section.name in names:
            _fail(f'section name {section.name} is used twice (lines {names[section.name].line} and {section.line})',
                  section)
        names[section.name] = section
        _check_lines(section)
    workspace = Workspace(doc)
    by_kind = {kind: [s for s in doc.sections if s.kind == kind] for kind in SECTION_KEYS}
    for section in by_kind['algebra']:
        workspace.algebras[section.name] = _build_algebra(section)
    for section in by_kind['homomorphism']:
        workspace.homomorphisms[section.name] = _build_homomorphism(section, workspace.algebras)
    for section in by_kind['module']:
        workspace.modules[section.name] = _build_module(section, workspace.algebras)
    for section in by_kind['morphism']:
        if any(ref.startswith('TREE:') for ref in _morphism_refs(section)):
            continue
        workspace.morphisms[section.name] = _build_morphism(
            section, lambda ref, where: _module_ref(workspace, ref, where))
    for section in by_kind['semifree']:
        workspace.trees[section.name] = _build_tree(workspace, section)
    for section in by_kind['check']:
        values, _ = _settings(section)
        workspace.checks[section.name] = CheckSpec(section.name, _require(section, values, 'verb'),
                                                   values.get('args', ''), section.line)
    log.info(f'built {doc.origin}: {len(workspace.algebras)} algebras, {len(workspace.modules)} modules, '
             f'{len(workspace.trees)} trees')
    return workspace


def load_document(path):
    with open(path, 'r', encoding='utf-8') as file:
        text = file.read()
    return parse_document(text, origin=path)


def load_workspace(path):
    return build_objects(load_document(path))
