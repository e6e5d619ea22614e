import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product
from typing import Optional

from dg_algebra import Violation, format_combo, graded_space, ground_algebra, opposite, tensor_algebras
from dg_config import engine_config
from dg_errors import (AlgebraMismatchError, InvalidStructureError, NotAChainMapError, NotAComplexError,
                       ShapeMismatchError, SideMismatchError)
from dg_linalg import (GradedMap, GradedSpace, Subspace, complex_homology, compose_graded, from_columns, kernel,
                       kernel_from_rref, lc_add, lc_scale, lc_sign, matrix, rank, rref, same_field, sign, solve_linear)
from dg_linalg import homology_dims as complex_homology_dims

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModuleElement:
    label: str
    degree: int
    left: Optional[int] = None
    right: Optional[int] = None


def same_algebra(a, b):
    if a is b:
        return True
    if a is None or b is None:
        return False
    return (a.basis == b.basis and a.idempotents == b.idempotents and a.mul == b.mul and a.diff == b.diff
            and a.field == b.field)


def degree_tag(n):
    return f'm{-n}' if n < 0 else str(n)


class DgModule:
    """Finite dg module; one-sided when one of the algebras is None.

    ``act`` holds x.a keyed by (module index, algebra index) over the right
    algebra, ``lact`` holds a.x keyed by (algebra index, module index) over the
    left algebra. Idempotent actions are implied by each element's idempotents.
    """

    def __init__(self, basis, right_algebra=None, left_algebra=None, act=None, lact=None, diff=None, name=None):
        if right_algebra is None and left_algebra is None:
            raise SideMismatchError('a module needs at least one algebra acting on it')
        algebras = [alg for alg in (left_algebra, right_algebra) if alg is not None]
        self.field = same_field(*[alg.field for alg in algebras])
        self.right_algebra, self.left_algebra = right_algebra, left_algebra
        self.basis = tuple(basis)
        self.name = name or 'M'
        labels = [x.label for x in self.basis]
        if len(set(labels)) != len(labels):
            raise InvalidStructureError(f'basis labels repeat in module {self.name}')
        self.labels = tuple(labels)
        self._index = {label: i for i, label in enumerate(labels)}
        one = self.field.one
        right_table, left_table = {}, {}
        for i, x in enumerate(self.basis):
            if right_algebra is not None:
                if x.right is None or not 0 <= x.right < len(right_algebra.idempotents):
                    raise InvalidStructureError(f'{x.label} has no right idempotent in {right_algebra.name}')
                right_table[(i, right_algebra.idempotents[x.right])] = {i: one}
            if left_algebra is not None:
                if x.left is None or not 0 <= x.left < len(left_algebra.idempotents):
                    raise InvalidStructureError(f'{x.label} has no left idempotent in {left_algebra.name}')
                left_table[(left_algebra.idempotents[x.left], i)] = {i: one}
        for key, value in (act or {}).items():
            right_table[key] = dict(value)
        for key, value in (lact or {}).items():
            left_table[key] = dict(value)
        self.act = {key: {k: v for k, v in value.items() if v} for key, value in right_table.items()}
        self.act = {key: value for key, value in self.act.items() if value}
        self.lact = {key: {k: v for k, v in value.items() if v} for key, value in left_table.items()}
        self.lact = {key: value for key, value in self.lact.items() if value}
        self.diff = {i: {k: v for k, v in value.items() if v} for i, value in (diff or {}).items()}
        self.diff = {i: value for i, value in self.diff.items() if value}

    def __repr__(self):
        return f'DgModule({self.name}, side={self.side}, dim={self.dim})'

    @property
    def side(self):
        if self.left_algebra is None:
            return 'right'
        if self.right_algebra is None:
            return 'left'
        return 'bimodule'

    @property
    def algebra(self):
        """The acting algebra of a one-sided module."""
        if self.side == 'bimodule':
            raise SideMismatchError(f'{self.name} is a bimodule; ask for left_algebra or right_algebra')
        return self.right_algebra if self.side == 'right' else self.left_algebra

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

    @cached_property
    def space(self):
        return graded_space(self.basis)

    @cached_property
    def at_degree(self):
        result = {}
        for i, x in enumerate(self.basis):
            result.setdefault(x.degree, []).append(i)
        return result

    @cached_property
    def positions(self):
        return {i: (self.degree(i), k) for n, indices in self.at_degree.items() for k, i in enumerate(indices)}

    def indices(self, n):
        return self.at_degree.get(n, [])

    def act_right(self, x, a):
        result = {}
        for i, c in x.items():
            for j, c2 in a.items():
                lc_add(result, self.act.get((i, j), {}), c * c2)
        return result

    def act_left(self, a, x):
        result = {}
        for j, c2 in a.items():
            for i, c in x.items():
                lc_add(result, self.lact.get((j, i), {}), c * c2)
        return result

    def d(self, x):
        result = {}
        for i, c in x.items():
            lc_add(result, self.diff.get(i, {}), c)
        return result

    def vector(self, combo, n):
        v = [self.field.zero] * len(self.indices(n))
        for i, c in combo.items():
            deg, k = self.positions[i]
            if deg != n:
                raise ShapeMismatchError(f'{self.labels[i]} is not in degree {n}')
            v[k] = c
        return v

    def combo_of(self, vector, n):
        return {i: c for i, c in zip(self.indices(n), vector) if c}

    def differential(self):
        return DgMorphism(self, self, 1, self.diff).graded_map

    def combo(self, terms):
        return {self.index(label): self.field.convert(c) for label, c in terms.items()}

    def window(self):
        return self.space.window

    def tables_equal(self, other):
        return (self.basis == other.basis and self.act == other.act and self.lact == other.lact
                and self.diff == other.diff and same_algebra(self.right_algebra, other.right_algebra)
                and same_algebra(self.left_algebra, other.left_algebra))

    def identity(self):
        return DgMorphism(self, self, 0, {i: {i: self.field.one} for i in range(self.dim)}, name=f'1_{self.name}')

    def zero_map(self, target, degree=0):
        return DgMorphism(self, target, degree, {})


def same_module(m, n):
    return m is n or m.tables_equal(n)


class DgMorphism:
    """Homogeneous map between modules, given by the images of source basis elements."""

    def __init__(self, source, target, degree, images, name=None):
        same_field(source.field, target.field)
        self.source, self.target, self.degree = source, target, degree
        self.images = {i: {k: v for k, v in image.items() if v} for i, image in images.items()}
        self.images = {i: image for i, image in self.images.items() if image}
        self.name = name or 'f'
        for i, image in self.images.items():
            for k in image:
                if target.degree(k) != source.degree(i) + degree:
                    raise ShapeMismatchError(
                        f'{self.name} sends {source.labels[i]} to {target.labels[k]}, not of degree {degree}')

    def __repr__(self):
        return f'DgMorphism({self.name}: {self.source.name} -> {self.target.name}, degree={self.degree})'

    @property
    def field(self):
        return self.source.field

    def image(self, i):
        return self.images.get(i, {})

    def apply(self, x):
        result = {}
        for i, c in x.items():
            lc_add(result, self.images.get(i, {}), c)
        return result

    @cached_property
    def graded_map(self):
        s, t = self.source, self.target
        blocks = {}
        for n in s.space.degrees:
            rows = [[self.field.zero] * s.space.dim(n) for _ in range(t.space.dim(n + self.degree))]
            for col, i in enumerate(s.indices(n)):
                for k, c in self.image(i).items():
                    rows[t.positions[k][1]][col] = c
            blocks[n] = matrix(rows, t.space.dim(n + self.degree), s.space.dim(n), self.field)
        return GradedMap(s.space, t.space, self.degree, blocks, self.field)

    def is_zero(self):
        return not self.images

    def __eq__(self, other):
        if not isinstance(other, DgMorphism):
            return NotImplemented
        if not (same_module(self.source, other.source) and same_module(self.target, other.target)):
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.images == other.images

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ShapeMismatchError('only morphisms of one degree can be added')
        images = {i: dict(image) for i, image in self.images.items()}
        for i, image in other.images.items():
            lc_add(images.setdefault(i, {}), image)
        return DgMorphism(self.source, self.target, self.degree, images, name=self.name)

    def scale(self, c):
        return DgMorphism(self.source, self.target, self.degree,
                          {i: lc_scale(image, c) for i, image in self.images.items()}, name=self.name)

    def __neg__(self):
        return self.scale(-self.field.one)

    def __sub__(self, other):
        return self + (-other)


def compose_morphisms(g, f):
    """g o f in GR-A: degrees add, no sign."""
    if not same_module(f.target, g.source):
        raise ShapeMismatchError(f'cannot compose {g.name} after {f.name}: {f.target.name} is not {g.source.name}')
    images = {i: g.apply(image) for i, image in f.images.items()}
    return DgMorphism(f.source, g.target, f.degree + g.degree, images, name=f'{g.name}o{f.name}')


def morphism_differential(f):
    """d(f) = d_N o f - (-1)^{|f|} f o d_M"""
    s, t = f.source, f.target
    images = {}
    for i in range(s.dim):
        value = t.d(f.image(i))
        lc_add(value, lc_sign(f.apply(s.diff.get(i, {})), f.degree + 1))
        if value:
            images[i] = value
    return DgMorphism(s, t, f.degree + 1, images, name=f'd({f.name})')


def hom_bifunctor_action(alpha, phi, f):
    """(alpha, phi) acting on f: (-1)^{|alpha|(|phi|+|f|)} phi o f o alpha."""
    result = compose_morphisms(phi, compose_morphisms(f, alpha))
    if alpha.degree * (phi.degree + f.degree) % 2:
        result = -result
    return result


def check_morphism(f):
    """Violations of side-appropriate graded linearity."""
    report = []
    s, t = f.source, f.target
    one = f.field.one
    if s.right_algebra is not None and t.right_algebra is not None:
        a_alg = s.right_algebra
        for i, a in product(range(s.dim), range(a_alg.dim)):
            lhs = f.apply(s.act.get((i, a), {}))
            rhs = t.act_right(f.image(i), {a: one})
            if lhs != rhs:
                report.append(Violation('right-linearity', (s.labels[i], a_alg.labels[a]), 'f(xa) != f(x)a'))
    if s.left_algebra is not None and t.left_algebra is not None:
        a_alg = s.left_algebra
        for a, i in product(range(a_alg.dim), range(s.dim)):
            lhs = f.apply(s.lact.get((a, i), {}))
            rhs = lc_sign(t.act_left({a: one}, f.image(i)), f.degree * a_alg.degree(a))
            if lhs != rhs:
                report.append(Violation('left-linearity', (a_alg.labels[a], s.labels[i]),
                                        'f(ax) != (-1)^{|f||a|} a f(x)'))
    return report


def validate_module(m):
    """Every violated module law, brute force over basis tuples."""
    report = []
    field, labels = m.field, m.labels
    one = field.one

    def degrees(combo):
        return {m.degree(k) for k in combo}

    def show(combo):
        return format_combo(combo, labels, field)

    ill_degreed = set()
    for i in range(m.dim):
        image = m.diff.get(i, {})
        if image and degrees(image) != {m.degree(i) + 1}:
            ill_degreed.add(i)
            report.append(Violation('differential-degree', (labels[i],), 'd must raise degree by exactly 1'))
        if image and any((m.basis[k].left, m.basis[k].right) != (m.basis[i].left, m.basis[i].right) for k in image):
            report.append(Violation('peirce', (labels[i],), 'd leaves the idempotent block'))
    for i in range(m.dim):
        if i in ill_degreed:
            continue
        dd = m.d(m.d({i: one}))
        if dd:
            report.append(Violation('d-squared', (labels[i],), f'd(d({labels[i]})) = {show(dd)}'))

    a_alg = m.right_algebra
    if a_alg is not None:
        for i, a in product(range(m.dim), range(a_alg.dim)):
            x = m.basis[i]
            value = m.act.get((i, a), {})
            ba = a_alg.basis[a]
            if a in a_alg.idempotents:
                expected = {i: one} if a_alg.idempotents[x.right] == a else {}
                if value != expected:
                    report.append(Violation('unitarity', (labels[i], a_alg.labels[a]),
                                            'idempotents must act as identity on their block, zero elsewhere'))
                continue
            if not value:
                continue
            if x.right != ba.left or any(m.basis[k].right != ba.right or m.basis[k].left != x.left for k in value):
                report.append(Violation('peirce', (labels[i], a_alg.labels[a]), 'x.a leaves the Peirce block'))
            if degrees(value) != {x.degree + ba.degree}:
                report.append(Violation('action-degree', (labels[i], a_alg.labels[a]), 'x.a is not of degree |x|+|a|'))
        for i, a, b in product(range(m.dim), range(a_alg.dim), range(a_alg.dim)):
            xa = m.act.get((i, a), {})
            ab = a_alg.product(a, b)
            if not xa and not ab:
                continue
            lhs = m.act_right(xa, {b: one})
            rhs = m.act_right({i: one}, ab)
            if lhs != rhs:
                report.append(Violation('associativity', (labels[i], a_alg.labels[a], a_alg.labels[b]),
                                        f'{show(lhs)} != {show(rhs)}'))
        for i, a in product(range(m.dim), range(a_alg.dim)):
            if i in ill_degreed:
                continue
            x, av = {i: one}, {a: one}
            lhs = m.d(m.act.get((i, a), {}))
            rhs = lc_add(m.act_right(m.d(x), av), lc_sign(m.act_right(x, a_alg.d(av)), m.degree(i)))
            if lhs != rhs:
                report.append(Violation('leibniz', (labels[i], a_alg.labels[a]), f'{show(lhs)} != {show(rhs)}'))

    b_alg = m.left_algebra
    if b_alg is not None:
        for b, i in product(range(b_alg.dim), range(m.dim)):
            x = m.basis[i]
            value = m.lact.get((b, i), {})
            bb = b_alg.basis[b]
            if b in b_alg.idempotents:
                expected = {i: one} if b_alg.idempotents[x.left] == b else {}
                if value != expected:
                    report.append(Violation('unitarity', (b_alg.labels[b], labels[i]),
                                            'idempotents must act as identity on their block, zero elsewhere'))
                continue
            if not value:
                continue
            if x.left != bb.right or any(m.basis[k].left != bb.left or m.basis[k].right != x.right for k in value):
                report.append(Violation('peirce', (b_alg.labels[b], labels[i]), 'a.x leaves the Peirce block'))
            if degrees(value) != {x.degree + bb.degree}:
                report.append(Violation('action-degree', (b_alg.labels[b], labels[i]), 'a.x is not of degree |a|+|x|'))
        for a, b, i in product(range(b_alg.dim), range(b_alg.dim), range(m.dim)):
            bx = m.lact.get((b, i), {})
            ab = b_alg.product(a, b)
            if not bx and not ab:
                continue
            lhs = m.act_left({a: one}, bx)
            rhs = m.act_left(ab, {i: one})
            if lhs != rhs:
                report.append(Violation('associativity', (b_alg.labels[a], b_alg.labels[b], labels[i]),
                                        f'{show(lhs)} != {show(rhs)}'))
        for b, i in product(range(b_alg.dim), range(m.dim)):
            if i in ill_degreed:
                continue
            x, bv = {i: one}, {b: one}
            lhs = m.d(m.lact.get((b, i), {}))
            rhs = lc_add(m.act_left(b_alg.d(bv), x), lc_sign(m.act_left(bv, m.d(x)), b_alg.degree(b)))
            if lhs != rhs:
                report.append(Violation('leibniz', (b_alg.labels[b], labels[i]), f'{show(lhs)} != {show(rhs)}'))

    if a_alg is not None and b_alg is not None:
        for b, i, a in product(range(b_alg.dim), range(m.dim), range(a_alg.dim)):
            lhs = m.act_right(m.lact.get((b, i), {}), {a: one})
            rhs = m.act_left({b: one}, m.act.get((i, a), {}))
            if lhs != rhs:
                report.append(Violation('middle-associativity', (b_alg.labels[b], labels[i], a_alg.labels[a]),
                                        f'{show(lhs)} != {show(rhs)}'))
    log.debug(f'validated {m.name}: {len(report)} violations')
    return report


# Regular modules and representables

def _restricted_module(a, keep, side, name):
    indices = [i for i in range(a.dim) if keep(a.basis[i])]
    local = {i: k for k, i in enumerate(indices)}
    basis = []
    for i in indices:
        b = a.basis[i]
        basis.append(ModuleElement(b.label, b.degree,
                                   b.left if side in ('left', 'bimodule') else None,
                                   b.right if side in ('right', 'bimodule') else None))

    def local_combo(combo):
        assert all(k in local for k in combo), f'{name} is not closed under the action'
        return {local[k]: c for k, c in combo.items()}

    act, lact = {}, {}
    for (i, j), value in a.mul.items():
        if side in ('right', 'bimodule') and i in local:
            act[(local[i], j)] = local_combo(value)
        if side in ('left', 'bimodule') and j in local:
            lact[(i, local[j])] = local_combo(value)
    diff = {local[i]: local_combo(value) for i, value in a.diff.items() if i in local}
    return DgModule(basis,
                    right_algebra=a if side in ('right', 'bimodule') else None,
                    left_algebra=a if side in ('left', 'bimodule') else None,
                    act=act, lact=lact, diff=diff, name=name)


def regular_right(a):
    return _restricted_module(a, lambda b: True, 'right', f'{a.name}_{a.name}')


def regular_left(a):
    return _restricted_module(a, lambda b: True, 'left', f'_{a.name}{a.name}')


def regular_bimodule(a):
    return _restricted_module(a, lambda b: True, 'bimodule', f'_{a.name}{a.name}_{a.name}')


def representable(a, i):
    """e_iA for the idempotent at position i."""
    return _restricted_module(a, lambda b: b.left == i, 'right', f'{a.labels[a.idempotents[i]]}{a.name}')


def left_representable(a, i):
    """Ae_i for the idempotent at position i."""
    return _restricted_module(a, lambda b: b.right == i, 'left', f'{a.name}{a.labels[a.idempotents[i]]}')


def left_projective(a, positions):
    """Ae for e the sum of the idempotents at the given positions."""
    positions = set(positions)
    label = '+'.join(a.labels[a.idempotents[i]] for i in sorted(positions))
    return _restricted_module(a, lambda b: b.right in positions, 'left', f'{a.name}({label})')


def zero_module(a, side='right'):
    return DgModule([], right_algebra=a if side in ('right', 'bimodule') else None,
                    left_algebra=a if side in ('left', 'bimodule') else None, name='0')


# Side conversions

def shift(m, k):
    """M[k]: M[k]^n = M^{n+k}, d scaled by (-1)^k, left action by (-1)^{k|a|}."""
    basis = [ModuleElement(x.label, x.degree - k, x.left, x.right) for x in m.basis]
    if basis:
        lo, hi = min(x.degree for x in basis), max(x.degree for x in basis)
        engine_config().check_window(lo, hi, f'{m.name}[{k}]')
    diff = {i: lc_sign(value, k) for i, value in m.diff.items()}
    lact = {}
    if m.left_algebra is not None:
        lact = {(a, i): lc_sign(value, k * m.left_algebra.degree(a)) for (a, i), value in m.lact.items()}
    return DgModule(basis, m.right_algebra, m.left_algebra, act=m.act, lact=lact, diff=diff,
                    name=m.name if k == 0 else f'{m.name}[{k}]')


def shift_morphism(f, k, source=None, target=None):
    """f[k] between the shifted modules; the underlying map is unchanged."""
    source = source or shift(f.source, k)
    target = target or shift(f.target, k)
    return DgMorphism(source, target, f.degree, f.images, name=f'{f.name}[{k}]')


def left_to_right(m):
    """Left A-module as right A^op-module: x.a^o = (-1)^{|a||x|} a x."""
    if m.side != 'left':
        raise SideMismatchError(f'{m.name} is a {m.side} module, not a left module')
    a = m.left_algebra
    basis = [ModuleElement(x.label, x.degree, None, x.left) for x in m.basis]
    act = {(i, j): lc_sign(value, a.degree(j) * m.degree(i)) for (j, i), value in m.lact.items()}
    return DgModule(basis, right_algebra=opposite(a), act=act, diff=m.diff, name=f'{m.name}^r')


def right_to_left(m, algebra=None):
    """Right A^op-module back to a left A-module: a x = (-1)^{|a||x|} x.a^o."""
    if m.side != 'right':
        raise SideMismatchError(f'{m.name} is a {m.side} module, not a right module')
    a = algebra or opposite(m.right_algebra)
    basis = [ModuleElement(x.label, x.degree, x.right, None) for x in m.basis]
    lact = {(j, i): lc_sign(value, a.degree(j) * m.degree(i)) for (i, j), value in m.act.items()}
    name = m.name[:-2] if m.name.endswith('^r') else f'{m.name}^l'
    return DgModule(basis, left_algebra=a, lact=lact, diff=m.diff, name=name)


def bimodule_to_right(m):
    """A-B bimodule as right B(x)A^op-module: x(b(x)a^o) = (-1)^{(|x|+|b|)|a|} a x b."""
    if m.side != 'bimodule':
        raise SideMismatchError(f'{m.name} is a {m.side} module, not a bimodule')
    a, b = m.left_algebra, m.right_algebra
    t = tensor_algebras(b, opposite(a))
    one, ia = m.field.one, len(a.idempotents)
    basis = [ModuleElement(x.label, x.degree, None, x.right * ia + x.left) for x in m.basis]
    act = {}
    for i in range(m.dim):
        x = {i: one}
        for bj in range(b.dim):
            xb = m.act_right(x, {bj: one})
            if not xb:
                continue
            for ak in range(a.dim):
                value = m.act_left({ak: one}, xb)
                if value:
                    odd = (m.degree(i) + b.degree(bj)) * a.degree(ak)
                    act[(i, bj * a.dim + ak)] = lc_sign(value, odd)
    return DgModule(basis, right_algebra=t, act=act, diff=m.diff, name=f'{m.name}^e')


def right_to_bimodule(m, left_algebra, right_algebra):
    """Inverse of bimodule_to_right for a right module over right(x)left^op."""
    a, b = left_algebra, right_algebra
    if m.side != 'right' or m.right_algebra.dim != a.dim * b.dim:
        raise AlgebraMismatchError(f'{m.name} is not a right module over {b.name}(x){a.name}^op')
    one, ia = m.field.one, len(a.idempotents)
    basis = [ModuleElement(x.label, x.degree, x.right % ia, x.right // ia) for x in m.basis]
    act, lact = {}, {}
    for i in range(m.dim):
        x = {i: one}
        for bj in range(b.dim):
            value = m.act_right(x, {bj * a.dim + e: one for e in a.idempotents})
            if value:
                act[(i, bj)] = value
        for ak in range(a.dim):
            value = m.act_right(x, {f * a.dim + ak: one for f in b.idempotents})
            if value:
                lact[(ak, i)] = lc_sign(value, m.degree(i) * a.degree(ak))
    name = m.name[:-2] if m.name.endswith('^e') else m.name
    return DgModule(basis, right_algebra=b, left_algebra=a, act=act, lact=lact, diff=m.diff, name=name)


def as_bimodule(m):
    """One-sided module with the ground algebra acting on the missing side."""
    if m.side == 'bimodule':
        return m
    k = ground_algebra(m.field)
    if m.side == 'right':
        basis = [ModuleElement(x.label, x.degree, 0, x.right) for x in m.basis]
        return DgModule(basis, right_algebra=m.right_algebra, left_algebra=k, act=m.act, diff=m.diff, name=m.name)
    basis = [ModuleElement(x.label, x.degree, x.left, 0) for x in m.basis]
    return DgModule(basis, left_algebra=m.left_algebra, right_algebra=k, lact=m.lact, diff=m.diff, name=m.name)


def drop_side(m, side):
    """Forget a (ground-algebra) side of a bimodule; basis indices are kept."""
    if m.side != 'bimodule':
        raise SideMismatchError(f'{m.name} is already one-sided')
    if side == 'left':
        basis = [ModuleElement(x.label, x.degree, None, x.right) for x in m.basis]
        return DgModule(basis, right_algebra=m.right_algebra, act=m.act, diff=m.diff, name=m.name)
    basis = [ModuleElement(x.label, x.degree, x.left, None) for x in m.basis]
    return DgModule(basis, left_algebra=m.left_algebra, lact=m.lact, diff=m.diff, name=m.name)


# Hom-complexes

class HomSpace:
    """Degree-wise bases of the graded maps M -> N that are linear over the shared algebras.

    ``right`` asks for f(xa) = f(x)a over the common right algebra, ``left``
    for f(ax) = (-1)^{|f||a|} a f(x) over the common left algebra. Each degree
    is the kernel of the linearity constraint system inside the maps that
    respect idempotent blocks; the basis is the reduced echelon basis.
    """

    def __init__(self, source, target, right=True, left=False, name=None):
        if right and not same_algebra(source.right_algebra, target.right_algebra):
            raise AlgebraMismatchError(f'{source.name} and {target.name} have different right algebras')
        if left and not same_algebra(source.left_algebra, target.left_algebra):
            raise AlgebraMismatchError(f'{source.name} and {target.name} have different left algebras')
        if source.right_algebra is None and right or source.left_algebra is None and left:
            raise SideMismatchError('linearity requested on a side without an algebra')
        same_field(source.field, target.field)
        self.source, self.target = source, target
        self.right, self.left = right, left
        self.field = source.field
        self.name = name or f'HOM({source.name},{target.name})'
        self._unknowns, self._index, self._subspaces = {}, {}, {}
        sw, tw = source.space.window, target.space.window
        if sw is not None and tw is not None:
            engine_config().check_window(tw[0] - sw[1], tw[1] - sw[0], self.name)
            for n in range(tw[0] - sw[1], tw[1] - sw[0] + 1):
                self._solve_degree(n)
        log.info(f'{self.name}: dims {self.dims()}')

    def _compatible(self, x, y):
        bx, by = self.source.basis[x], self.target.basis[y]
        if self.right and bx.right != by.right:
            return False
        if self.left and bx.left != by.left:
            return False
        return True

    def _solve_degree(self, n):
        s, t, field = self.source, self.target, self.field
        unknowns = [(x, y) for x in range(s.dim) for y in t.indices(s.degree(x) + n) if self._compatible(x, y)]
        index = {pair: u for u, pair in enumerate(unknowns)}
        equations = []
        if self.right:
            a_alg = s.right_algebra
            for x, a in product(range(s.dim), a_alg.non_idempotents):
                rows = {}
                for z, c in s.act.get((x, a), {}).items():
                    for w in t.indices(s.degree(z) + n):
                        u = index.get((z, w))
                        if u is not None:
                            lc_add(rows.setdefault(w, {}), {u: c})
                for y in t.indices(s.degree(x) + n):
                    u = index.get((x, y))
                    if u is None:
                        continue
                    for w, c in t.act.get((y, a), {}).items():
                        lc_add(rows.setdefault(w, {}), {u: -c})
                equations.extend(row for row in rows.values() if row)
        if self.left:
            b_alg = s.left_algebra
            for b, x in product(b_alg.non_idempotents, range(s.dim)):
                rows = {}
                for z, c in s.lact.get((b, x), {}).items():
                    for w in t.indices(s.degree(z) + n):
                        u = index.get((z, w))
                        if u is not None:
                            lc_add(rows.setdefault(w, {}), {u: c})
                odd = n * b_alg.degree(b)
                for y in t.indices(s.degree(x) + n):
                    u = index.get((x, y))
                    if u is None:
                        continue
                    for w, c in t.lact.get((b, y), {}).items():
                        lc_add(rows.setdefault(w, {}), {u: -sign(c, odd)})
                equations.extend(row for row in rows.values() if row)
        width = len(unknowns)
        dense = [[row.get(u, field.zero) for u in range(width)] for row in equations]
        reduced, pivots = rref(dense, width, field)
        solutions = kernel_from_rref(reduced, pivots, width, field)
        sub = Subspace(solutions, width, field)
        if sub.dim:
            self._unknowns[n], self._index[n], self._subspaces[n] = unknowns, index, sub
            log.debug(f'{self.name} degree {n}: {width} unknowns, {len(equations)} equations, dim {sub.dim}')
        else:
            self._unknowns[n], self._index[n] = unknowns, index

    @property
    def degrees(self):
        return sorted(self._subspaces)

    def dim(self, n):
        sub = self._subspaces.get(n)
        return sub.dim if sub else 0

    def dims(self):
        return {n: self.dim(n) for n in self.degrees}

    @cached_property
    def space(self):
        return GradedSpace.from_degrees({n: [f'h{degree_tag(n)}_{k}' for k in range(self.dim(n))]
                                         for n in self.degrees})

    def morphism(self, n, coefficients):
        sub = self._subspaces.get(n)
        images = {}
        if sub is not None:
            vector = [self.field.zero] * sub.ambient
            for c, row in zip(coefficients, sub.basis):
                if c:
                    vector = [v + c * r for v, r in zip(vector, row)]
            for (x, y), c in zip(self._unknowns[n], vector):
                if c:
                    images.setdefault(x, {})[y] = c
        return DgMorphism(self.source, self.target, n, images, name=f'{self.name}^{n}')

    @cached_property
    def _basis_maps(self):
        result = {}
        for n in self.degrees:
            maps = []
            for k in range(self.dim(n)):
                coefficients = [self.field.zero] * self.dim(n)
                coefficients[k] = self.field.one
                maps.append(self.morphism(n, coefficients))
            result[n] = maps
        return result

    def basis_maps(self, n):
        return self._basis_maps.get(n, [])

    def vectorize(self, f):
        n = f.degree
        index = self._index.get(n)
        if index is None:
            if f.is_zero():
                return []
            raise ShapeMismatchError(f'{self.name} has no maps of degree {n}')
        v = [self.field.zero] * len(index)
        for x, image in f.images.items():
            for y, c in image.items():
                u = index.get((x, y))
                if u is None:
                    raise ShapeMismatchError(f'{f.name} does not respect idempotent blocks at '
                                             f'({self.source.labels[x]}, {self.target.labels[y]})')
                v[u] = c
        return v

    def coordinates(self, f):
        """Coordinates of a homogeneous linear map in the echelon basis."""
        sub = self._subspaces.get(f.degree)
        if sub is None:
            if f.is_zero():
                return []
            raise ValueError(f'{f.name} is not a linear map in {self.name}')
        return sub.coordinates(self.vectorize(f))

    def contains(self, f):
        sub = self._subspaces.get(f.degree)
        if sub is None:
            return f.is_zero()
        try:
            return sub.contains(self.vectorize(f))
        except ShapeMismatchError:
            return False

    @cached_property
    def differential_columns(self):
        columns = {}
        for n in self.degrees:
            cols = []
            for f in self.basis_maps(n):
                df = morphism_differential(f)
                cols.append(self.coordinates(df))
            columns[n] = cols
        return columns

    def differential(self):
        blocks = {}
        for n in self.degrees:
            blocks[n] = from_columns(self.differential_columns[n], self.dim(n + 1), self.field)
        d = GradedMap(self.space, self.space, 1, blocks, self.field)
        assert compose_graded(d, d).is_zero(), f'the differential of {self.name} does not square to zero'
        return d

    def homology(self):
        window = self.space.window
        if window is None:
            return {}
        return complex_homology_dims(self.differential(), window)

    def cycles(self, n):
        """Basis of the degree-n cycles, as morphisms."""
        if not self.dim(n):
            return []
        block = from_columns(self.differential_columns[n], self.dim(n + 1), self.field)
        return [self.morphism(n, v) for v in kernel(block, self.field)]


def hom_complex(m, n):
    """HOM_A(M, N) with d(f) = d_N f - (-1)^{|f|} f d_M, for modules on the same side."""
    if m.side != n.side:
        raise SideMismatchError(f'{m.name} is a {m.side} module and {n.name} a {n.side} module')
    right = m.side in ('right', 'bimodule')
    left = m.side in ('left', 'bimodule')
    return HomSpace(m, n, right=right, left=left)


# Cones, homotopies, homology

def is_chain_map(f):
    if f.degree != 0:
        return False
    return morphism_differential(f).is_zero()


@dataclass
class TwistedSum:
    module: DgModule
    inclusion: DgMorphism
    projection: DgMorphism


def twisted_sum(l, n, s=None, name=None):
    """L (+) N with differential [[d_L, s], [0, d_N]] for s: N -> L of degree 1."""
    if l.side != n.side or not same_algebra(l.right_algebra, n.right_algebra) \
            or not same_algebra(l.left_algebra, n.left_algebra):
        raise SideMismatchError(f'{l.name} and {n.name} live over different algebras')
    if s is not None and s.degree != 1:
        raise ShapeMismatchError(f'the twisting map must have degree 1, not {s.degree}')
    offset = l.dim
    basis = [ModuleElement(f'<{x.label}|0>', x.degree, x.left, x.right) for x in l.basis]
    basis += [ModuleElement(f'<0|{x.label}>', x.degree, x.left, x.right) for x in n.basis]

    def moved(combo):
        return {k + offset: c for k, c in combo.items()}

    act = dict(l.act)
    act.update({(i + offset, a): moved(value) for (i, a), value in n.act.items()})
    lact = dict(l.lact)
    lact.update({(a, i + offset): moved(value) for (a, i), value in n.lact.items()})
    diff = dict(l.diff)
    for i in range(n.dim):
        value = moved(n.diff.get(i, {}))
        if s is not None:
            lc_add(value, s.image(i))
        if value:
            diff[i + offset] = value
    module = DgModule(basis, l.right_algebra, l.left_algebra, act=act, lact=lact, diff=diff,
                      name=name or f'{l.name}+{n.name}')
    for i in range(module.dim):
        if module.d(module.d({i: module.field.one})):
            raise NotAComplexError(f'the twisting map does not satisfy d_L s + s d_N = 0 at {module.labels[i]}')
    one = module.field.one
    inclusion = DgMorphism(l, module, 0, {i: {i: one} for i in range(l.dim)}, name='inc')
    projection = DgMorphism(module, n, 0, {i + offset: {i: one} for i in range(n.dim)}, name='proj')
    return TwistedSum(module, inclusion, projection)


def direct_sum(m, n):
    return twisted_sum(m, n).module


def cone(f):
    """C(f) = N (+) M[1] with [[d_N, f], [0, d_{M[1]}]]; returns the module and N -> C(f) -> M[1]."""
    if not is_chain_map(f):
        raise NotAChainMapError(f'{f.name} is not a chain map')
    shifted = shift(f.source, 1)
    s = DgMorphism(shifted, f.target, 1, f.images, name=f.name)
    return twisted_sum(f.target, shifted, s, name=f'C({f.name})')


def null_homotopy(f, hom=None):
    """sigma in HOM^-1 with f = d_N sigma + sigma d_M, or None."""
    if not is_chain_map(f):
        raise NotAChainMapError(f'{f.name} is not a chain map')
    if f.is_zero():
        return DgMorphism(f.source, f.target, -1, {}, name='sigma')
    hom = hom or hom_complex(f.source, f.target)
    sigmas = hom.basis_maps(-1)
    target = hom.vectorize(f)
    if not sigmas:
        return None
    columns = [hom.vectorize(morphism_differential(sigma)) for sigma in sigmas]
    solution = solve_linear(from_columns(columns, len(target), f.field), target, f.field)
    if solution is None:
        return None
    sigma = hom.morphism(-1, solution)
    sigma.name = 'sigma'
    return sigma


def is_contractible(m):
    sigma = null_homotopy(m.identity())
    return sigma is not None, sigma


def homology(m):
    return complex_homology(m.differential())


def homology_dims(m):
    return {n: h.dimension for n, h in homology(m).items()}


def is_acyclic(m):
    return not any(homology_dims(m).values())


def _class_coordinates(h, v, field):
    columns = h.representatives + h.boundaries
    solution = solve_linear(from_columns(columns, len(v), field), v, field)
    if solution is None:
        raise ValueError('vector is not a cycle')
    return solution[:len(h.representatives)]


@dataclass
class HomologyModule:
    dims: dict
    representatives: dict
    action: dict = dc_field(default_factory=dict)


def homology_module(m, with_action=False):
    """H^*(M) dimensions, and optionally the induced H^*(A)-action on representatives."""
    hm = homology(m)
    reps = {n: [m.combo_of(v, n) for v in h.representatives] for n, h in hm.items()}
    result = HomologyModule({n: h.dimension for n, h in hm.items()}, reps)
    if not with_action:
        return result
    a = m.algebra if m.side != 'bimodule' else m.right_algebra
    ha = complex_homology(a.differential())
    alg_reps = {p: [{a_idx: c for a_idx, c in zip([i for i in range(a.dim) if a.degree(i) == p], v) if c}
                    for v in h.representatives] for p, h in ha.items()}
    for (n, zs), (p, alphas) in product(reps.items(), alg_reps.items()):
        for (k, z), (l, alpha) in product(enumerate(zs), enumerate(alphas)):
            if m.side == 'left':
                value = m.act_left(alpha, z)
            else:
                value = m.act_right(z, alpha)
            if not value or n + p not in hm:
                continue
            coords = _class_coordinates(hm[n + p], m.vector(value, n + p), m.field)
            result.action[((n, k), (p, l))] = {(n + p, r): c for r, c in enumerate(coords) if c}
    return result


def homology_map(f, n, source_homology=None, target_homology=None):
    """Matrix of H^n(f): H^n(M) -> H^n(N) as a list of columns."""
    if not is_chain_map(f):
        raise NotAChainMapError(f'{f.name} is not a chain map')
    hs = (source_homology or homology(f.source)).get(n)
    ht = (target_homology or homology(f.target)).get(n)
    if hs is None or not hs.representatives:
        return []
    columns = []
    for v in hs.representatives:
        image = f.apply(f.source.combo_of(v, n))
        if ht is None:
            assert not image, f'{f.name} sends a cycle outside the target complex'
            columns.append([])
            continue
        columns.append(_class_coordinates(ht, f.target.vector(image, n), f.field))
    return columns


def is_homology_iso(f):
    hs, ht = homology(f.source), homology(f.target)
    for n in sorted(set(hs) | set(ht)):
        ds = hs[n].dimension if n in hs else 0
        dt = ht[n].dimension if n in ht else 0
        if ds != dt:
            return False
        if ds == 0:
            continue
        columns = homology_map(f, n, hs, ht)
        if rank(from_columns(columns, dt, f.field), f.field) != dt:
            return False
    return True


def is_quasi_iso(f):
    return is_acyclic(cone(f).module)


def homotopy_category_hom(m, n):
    """dim of H^0 HOM(M, N): morphisms M -> N in the homotopy category."""
    return hom_complex(m, n).homology().get(0, 0)


def is_isomorphism(f):
    if not is_chain_map(f):
        return False
    gm = f.graded_map
    degrees = set(f.source.space.degrees) | set(f.target.space.degrees)
    for n in degrees:
        if f.source.space.dim(n) != f.target.space.dim(n):
            return False
        if f.source.space.dim(n) and rank(gm.block(n), f.field) != f.source.space.dim(n):
            return False
    return True


@dataclass
class ConflationReport:
    conflation: bool
    detail: str = ''
    section: Optional[DgMorphism] = None
    retraction: Optional[DgMorphism] = None
    twist: Optional[DgMorphism] = None
    twist_ok: bool = False
    comparison: Optional[DgMorphism] = None
    comparison_iso: bool = False

    @property
    def ok(self):
        return self.conflation and self.twist_ok and self.comparison_iso


def _exact_degreewise(u, v):
    l, m, n = u.source, u.target, v.target
    gu, gv = u.graded_map, v.graded_map
    for d in set(l.space.degrees) | set(m.space.degrees) | set(n.space.degrees):
        if m.space.dim(d) != l.space.dim(d) + n.space.dim(d):
            return False
        if l.space.dim(d) and rank(gu.block(d), u.field) != l.space.dim(d):
            return False
        if n.space.dim(d) and rank(gv.block(d), v.field) != n.space.dim(d):
            return False
    return True


def _solve_in(hom, degree, pairs):
    """Coefficients c with sum_j c_j T(b_j) = rhs over the basis b_j of hom in a degree."""
    basis = hom.basis_maps(degree)
    if not basis:
        return None
    columns, rhs = [], []
    for b in basis:
        col = []
        for transform, _ in pairs:
            col.extend(transform(b))
        columns.append(col)
    for _, target in pairs:
        rhs.extend(target)
    solution = solve_linear(from_columns(columns, len(rhs), hom.field), rhs, hom.field)
    return None if solution is None else hom.morphism(degree, solution)


def ses_to_triangle_check(u, v):
    """Split a conflation 0 -> L -> M -> N -> 0 into a twisted sum of L and N."""
    l, m, n = u.source, u.target, v.target
    if not same_module(u.target, v.source):
        raise ShapeMismatchError('u and v are not composable')
    if not (is_chain_map(u) and is_chain_map(v)):
        return ConflationReport(False, 'u and v must be chain maps')
    if not compose_morphisms(v, u).is_zero():
        return ConflationReport(False, 'v o u is not zero')
    if not _exact_degreewise(u, v):
        return ConflationReport(False, 'the sequence is not exact degreewise')
    field = m.field
    hom_nm = hom_complex(n, m)
    hom_nn = hom_complex(n, n)
    identity_n = hom_nn.vectorize(n.identity())

    def after_v(t):
        return hom_nn.vectorize(compose_morphisms(v, t))

    # prefer a section landing in the echelon complement of im(u)
    image_u = {d: Subspace([m.vector(u.image(i), d) for i in l.indices(d)], len(m.indices(d)), field)
               for d in m.space.degrees}

    def pivot_part(t):
        values = []
        for d in n.space.degrees:
            sub = image_u.get(d)
            if sub is None:
                continue
            for i in n.indices(d):
                image = m.vector(t.image(i), d)
                values.extend(image[p] for p in sub.pivots)
        return values

    zero_pivots = pivot_part(DgMorphism(n, m, 0, {}))
    t = _solve_in(hom_nm, 0, [(after_v, identity_n), (pivot_part, zero_pivots)])
    if t is None:
        t = _solve_in(hom_nm, 0, [(after_v, identity_n)])
    if t is None:
        return ConflationReport(False, 'the sequence does not split in the graded category')
    t.name = 't'
    hom_ml = hom_complex(m, l)
    hom_ll = hom_complex(l, l)
    hom_nl = hom_complex(n, l)
    r = _solve_in(hom_ml, 0, [(lambda b: hom_ll.vectorize(compose_morphisms(b, u)), hom_ll.vectorize(l.identity())),
                              (lambda b: hom_nl.vectorize(compose_morphisms(b, t)),
                               hom_nl.vectorize(DgMorphism(n, l, 0, {})))])
    if r is None:
        return ConflationReport(False, 'no graded retraction compatible with the section', section=t)
    r.name = 'r'
    d_m = DgMorphism(m, m, 1, m.diff, name='d')
    s = compose_morphisms(r, compose_morphisms(d_m, t))
    s = DgMorphism(n, l, 1, s.images, name='s')
    d_l = DgMorphism(l, l, 1, l.diff)
    d_n = DgMorphism(n, n, 1, n.diff)
    twist_ok = (compose_morphisms(d_l, s) + compose_morphisms(s, d_n)).is_zero()
    report = ConflationReport(True, '', section=t, retraction=r, twist=s, twist_ok=twist_ok)
    if not twist_ok:
        report.detail = 'd_L s + s d_N is not zero'
        return report
    total = twisted_sum(l, n, s)
    offset = l.dim
    images = {i: u.image(i) for i in range(l.dim)}
    images.update({i + offset: t.image(i) for i in range(n.dim)})
    comparison = DgMorphism(total.module, m, 0, images, name='phi')
    report.comparison = comparison
    report.comparison_iso = is_isomorphism(comparison) and not check_morphism(comparison)
    if not report.comparison_iso:
        report.detail = 'the comparison with the twisted sum is not an isomorphism'
    return report
