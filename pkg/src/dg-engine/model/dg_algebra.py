import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product

from dg_errors import FieldMismatchError, InvalidStructureError, NotUnitaryError
from dg_linalg import (Field, GradedSpace, GradedMap, homology_dims, lc_add, lc_sign, matrix, rank,
                       same_field, sign)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BasisElement:
    label: str
    degree: int
    left: int
    right: int


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple
    detail: str = ''

    def __str__(self):
        return f'{self.law} at ({", ".join(self.witness)}): {self.detail}'


def graded_space(basis):
    labels = {}
    for element in basis:
        labels.setdefault(element.degree, []).append(element.label)
    return GradedSpace.from_degrees(labels)


def format_combo(combo, labels, field):
    if not combo:
        return '0'
    return ' + '.join(f'{field.format(c)}*{labels[i]}' for i, c in sorted(combo.items()))


class DgAlgebra:
    """Finite dg algebra with a distinguished family of orthogonal idempotents.

    ``idempotents`` lists basis indices. ``mul`` maps ordered index pairs to
    linear combinations (dict index -> scalar) and ``diff`` maps an index to its
    differential. Products with idempotents follow from the Peirce data; explicit
    entries override them, which is how corrupted tables are represented.
    """

    def __init__(self, field, basis, idempotents, mul=None, diff=None, name=None):
        self.field = field
        self.basis = tuple(basis)
        self.idempotents = tuple(idempotents)
        self.name = name or 'A'
        labels = [b.label for b in self.basis]
        if len(set(labels)) != len(labels):
            raise InvalidStructureError(f'basis labels repeat in algebra {self.name}')
        self.labels = tuple(labels)
        self._index = {label: i for i, label in enumerate(labels)}
        table = {}
        for position, e in enumerate(self.idempotents):
            table[(e, e)] = {e: field.one}
        for i, b in enumerate(self.basis):
            if i in self.idempotents:
                continue
            table[(self.idempotents[b.left], i)] = {i: field.one}
            table[(i, self.idempotents[b.right])] = {i: field.one}
        for key, value in (mul or {}).items():
            table[key] = {k: v for k, v in value.items() if v}
        self.mul = {key: value for key, value in table.items() if value}
        self.diff = {i: {k: v for k, v in value.items() if v} for i, value in (diff or {}).items()}
        self.diff = {i: value for i, value in self.diff.items() if value}

    def __repr__(self):
        return f'DgAlgebra({self.name}, dim={self.dim}, field={self.field.name})'

    @property
    def dim(self):
        return len(self.basis)

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f'{label} is not a basis element of {self.name}') from None

    def degree(self, i):
        return self.basis[i].degree

    def idempotent_position(self, i):
        return self.idempotents.index(i)

    @property
    def non_idempotents(self):
        return [i for i in range(self.dim) if i not in self.idempotents]

    def product(self, i, j):
        return self.mul.get((i, j), {})

    def multiply(self, x, y):
        result = {}
        for i, a in x.items():
            for j, b in y.items():
                lc_add(result, self.product(i, j), a * b)
        return result

    def d(self, x):
        result = {}
        for i, a in x.items():
            lc_add(result, self.diff.get(i, {}), a)
        return result

    def unit(self):
        return {e: self.field.one for e in self.idempotents}

    @cached_property
    def space(self):
        return graded_space(self.basis)

    @cached_property
    def positions(self):
        """basis index -> (degree, position inside that degree)"""
        counters, result = {}, {}
        for i, b in enumerate(self.basis):
            result[i] = (b.degree, counters.get(b.degree, 0))
            counters[b.degree] = counters.get(b.degree, 0) + 1
        return result

    def differential(self):
        space = self.space
        columns = {}
        for i, b in enumerate(self.basis):
            columns.setdefault(b.degree, []).append(self.diff.get(i, {}))
        blocks = {}
        for n in space.degrees:
            rows = [[self.field.zero] * space.dim(n) for _ in range(space.dim(n + 1))]
            for col, image in enumerate(columns.get(n, [])):
                for k, c in image.items():
                    deg, pos = self.positions[k]
                    if deg != n + 1:
                        raise InvalidStructureError(f'd({self.labels[k]}) has the wrong degree')
                    rows[pos][col] = c
            blocks[n] = matrix(rows, space.dim(n + 1), space.dim(n), self.field)
        return GradedMap(space, space, 1, blocks, self.field)

    def combo(self, terms):
        """{label: scalar} -> {index: scalar}"""
        return {self.index(label): self.field.convert(c) for label, c in terms.items()}


def validate_algebra(a):
    """Every violated law of a dg algebra with enough idempotents, with witnesses."""
    report = []
    field, labels = a.field, a.labels
    idem_set = set(a.idempotents)

    def deg_of(combo):
        return {a.degree(k) for k in combo}

    for position, e in enumerate(a.idempotents):
        b = a.basis[e]
        if b.degree != 0 or b.left != position or b.right != position:
            report.append(Violation('idempotent', (labels[e],), 'must have degree 0 and itself as both idempotents'))
        for f in a.idempotents:
            expected = {e: field.one} if e == f else {}
            if a.product(e, f) != expected:
                report.append(Violation('idempotent', (labels[e], labels[f]), 'idempotents must be orthogonal'))
        if a.diff.get(e):
            report.append(Violation('d-idempotent', (labels[e],), 'd(e) must be 0'))

    for i, j in product(range(a.dim), repeat=2):
        p = a.product(i, j)
        bi, bj = a.basis[i], a.basis[j]
        if i in idem_set or j in idem_set:
            if i in idem_set and j in idem_set:
                continue
            if i in idem_set:
                expected = {j: field.one} if a.idempotents[bj.left] == i else {}
            else:
                expected = {i: field.one} if a.idempotents[bi.right] == j else {}
            if p != expected:
                report.append(Violation('idempotent-action', (labels[i], labels[j]),
                                        'idempotents must act as identity or zero'))
            continue
        if not p:
            continue
        if bi.right != bj.left:
            report.append(Violation('peirce', (labels[i], labels[j]), 'product across different idempotents'))
        for k in p:
            bk = a.basis[k]
            if bk.left != bi.left or bk.right != bj.right:
                report.append(Violation('peirce', (labels[i], labels[j]),
                                        f'{labels[k]} is outside the expected Peirce block'))
                break
        if deg_of(p) != {bi.degree + bj.degree}:
            report.append(Violation('mul-degree', (labels[i], labels[j]), 'product is not homogeneous of degree |a|+|b|'))

    for i, j, k in product(range(a.dim), repeat=3):
        if not a.product(i, j) and not a.product(j, k):
            continue
        left = a.multiply(a.product(i, j), {k: field.one})
        right = a.multiply({i: field.one}, a.product(j, k))
        if left != right:
            report.append(Violation('associativity', (labels[i], labels[j], labels[k]),
                                    f'{format_combo(left, labels, field)} != {format_combo(right, labels, field)}'))

    ill_degreed = set()
    for i in range(a.dim):
        image = a.diff.get(i, {})
        if image and deg_of(image) != {a.degree(i) + 1}:
            ill_degreed.add(i)
            report.append(Violation('differential-degree', (labels[i],), 'd must raise degree by exactly 1'))
        if image and any(a.basis[k].left != a.basis[i].left or a.basis[k].right != a.basis[i].right
                         for k in image):
            report.append(Violation('peirce', (labels[i],), 'd leaves the Peirce block'))
    for i in range(a.dim):
        if i in ill_degreed:
            continue
        dd = a.d(a.d({i: field.one}))
        if dd:
            report.append(Violation('d-squared', (labels[i],), f'd(d({labels[i]})) = {format_combo(dd, labels, field)}'))

    for i, j in product(range(a.dim), repeat=2):
        if i in ill_degreed or j in ill_degreed:
            continue
        x, y = {i: field.one}, {j: field.one}
        lhs = a.d(a.product(i, j))
        rhs = lc_add(a.multiply(a.d(x), y), lc_sign(a.multiply(x, a.d(y)), a.degree(i)))
        if lhs != rhs:
            report.append(Violation('leibniz', (labels[i], labels[j]),
                                    f'{format_combo(lhs, labels, field)} != {format_combo(rhs, labels, field)}'))
    log.debug(f'validated {a.name}: {len(report)} violations')
    return report


def opposite(a):
    """A^op: same basis, idempotents swapped, b^o a^o = (-1)^{|a||b|} (ab)^o."""
    basis = [BasisElement(b.label, b.degree, b.right, b.left) for b in a.basis]
    mul = {}
    for (i, j), value in a.mul.items():
        mul[(j, i)] = lc_sign(value, a.degree(i) * a.degree(j))
    return DgAlgebra(a.field, basis, a.idempotents, mul, a.diff, name=f'{a.name}^op')


def tensor_label(x, y):
    return f'<{x}~{y}>'


def tensor_algebras(a, b):
    """A (x) B with (a(x)b)(c(x)d) = (-1)^{|b||c|} ac(x)bd."""
    try:
        field = same_field(a.field, b.field)
    except FieldMismatchError as error:
        raise FieldMismatchError(f'cannot tensor {a.name} with {b.name}: {error}') from None
    nb, ib = b.dim, len(b.idempotents)

    def pair(i, j):
        return i * nb + j

    basis = [BasisElement(tensor_label(x.label, y.label), x.degree + y.degree,
                          x.left * ib + y.left, x.right * ib + y.right)
             for x in a.basis for y in b.basis]
    idempotents = [pair(e, f) for e in a.idempotents for f in b.idempotents]
    mul = {}
    for (i, k), left in a.mul.items():
        for (j, l), right in b.mul.items():
            odd = b.degree(j) * a.degree(k)
            value = {}
            for p, c in left.items():
                for q, c2 in right.items():
                    lc_add(value, {pair(p, q): sign(c * c2, odd)})
            mul[(pair(i, j), pair(k, l))] = value
    diff = {}
    for i in range(a.dim):
        for j in range(b.dim):
            value = {}
            for p, c in a.diff.get(i, {}).items():
                lc_add(value, {pair(p, j): c})
            for q, c in b.diff.get(j, {}).items():
                lc_add(value, {pair(i, q): sign(c, a.degree(i))})
            if value:
                diff[pair(i, j)] = value
    return DgAlgebra(field, basis, idempotents, mul, diff, name=f'{a.name}(x){b.name}')


class AlgebraHom:
    """Homomorphism of dg algebras given on the source basis."""

    def __init__(self, source, target, images, name=None):
        same_field(source.field, target.field)
        self.source, self.target = source, target
        self.images = {i: {k: v for k, v in image.items() if v} for i, image in images.items()}
        self.name = name or 'iota'

    def __repr__(self):
        return f'AlgebraHom({self.name}: {self.source.name} -> {self.target.name})'

    def apply(self, x):
        result = {}
        for i, c in x.items():
            lc_add(result, self.images.get(i, {}), c)
        return result

    @classmethod
    def identity(cls, a):
        return cls(a, a, {i: {i: a.field.one} for i in range(a.dim)}, name=f'id_{a.name}')

    def idempotent_support(self):
        """For each source idempotent position, the target idempotent positions in its image."""
        one, target = self.target.field.one, self.target
        support = []
        for e in self.source.idempotents:
            image = self.images.get(e, {})
            if any(k not in target.idempotents or c != one for k, c in image.items()):
                return None
            support.append(sorted(target.idempotent_position(k) for k in image))
        return support

    def right_idempotent_map(self):
        """target idempotent position -> source idempotent position, for unitary maps."""
        support = self.idempotent_support()
        if support is None:
            raise NotUnitaryError(f'{self.name} does not send idempotents to sums of idempotents')
        result = {}
        for position, targets in enumerate(support):
            for t in targets:
                result[t] = position
        if len(result) != len(self.target.idempotents):
            raise NotUnitaryError(f'{self.name} is not unitary: some target idempotent is not covered')
        return result


def check_homomorphism(iota, unitary=True):
    report = []
    s, t = iota.source, iota.target
    field = s.field
    for i in range(s.dim):
        image = iota.images.get(i, {})
        if any(t.degree(k) != s.degree(i) for k in image):
            report.append(Violation('degree', (s.labels[i],), 'image is not of the same degree'))
        if iota.apply(s.d({i: field.one})) != t.d(image):
            report.append(Violation('differential', (s.labels[i],), 'does not commute with d'))
    for i, j in product(range(s.dim), repeat=2):
        lhs = iota.apply(s.product(i, j))
        rhs = t.multiply(iota.images.get(i, {}), iota.images.get(j, {}))
        if lhs != rhs:
            report.append(Violation('multiplicative', (s.labels[i], s.labels[j]),
                                    f'{format_combo(lhs, t.labels, field)} != {format_combo(rhs, t.labels, field)}'))
    if unitary:
        support = iota.idempotent_support()
        if support is None:
            report.append(Violation('unitary', tuple(s.labels[e] for e in s.idempotents),
                                    'idempotents must map to sums of target idempotents'))
        else:
            covered = [k for targets in support for k in targets]
            if sorted(covered) != list(range(len(t.idempotents))):
                report.append(Violation('unitary', tuple(t.labels[e] for e in t.idempotents),
                                        'target idempotents must be covered exactly once'))
    return report


def check_phi_iso(a, b):
    """Phi(a (x) b^o) = (-1)^{|a||b|} (b (x) a^o)^o as an algebra isomorphism."""
    source = tensor_algebras(a, opposite(b))
    target = opposite(tensor_algebras(b, opposite(a)))
    field, nb = a.field, b.dim
    images = {}
    for i in range(a.dim):
        for j in range(b.dim):
            images[i * nb + j] = {j * a.dim + i: sign(field.one, a.degree(i) * b.degree(j))}
    phi = AlgebraHom(source, target, images, name='Phi')
    report = check_homomorphism(phi, unitary=False)
    rows = [[images[col].get(row, field.zero) for col in range(source.dim)] for row in range(target.dim)]
    if rank(matrix(rows, target.dim, source.dim, field), field) != source.dim or source.dim != target.dim:
        report.append(Violation('bijective', (a.name, b.name), 'Phi is not a bijection'))
    return report


def algebra_homology(a):
    space = a.space
    if space.window is None:
        return {}
    return homology_dims(a.differential(), space.window)


def ground_algebra(field=None, label='e'):
    field = field or Field(0)
    return DgAlgebra(field, [BasisElement(label, 0, 0, 0)], [0], name='A0')
