import logging
from dataclasses import dataclass
from functools import cached_property

from sympy import QQ, GF, isprime
from sympy.polys.matrices import DomainMatrix

from dg_errors import FieldMismatchError, ShapeMismatchError, NotAComplexError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Field:
    """Exact ground field: Q when characteristic is 0, F_p otherwise."""
    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or (p != 0 and not isprime(p)):
            raise ValueError(f'Fp {p} not supported. Only prime characteristics are supported.')

    @classmethod
    def parse(cls, text):
        words = text.split()
        if words == ['Q']:
            return cls(0)
        if len(words) == 2 and words[0] == 'Fp' and words[1].isdigit():
            return cls(int(words[1]))
        raise ValueError(f'{text} not supported. Only "Q" and "Fp <prime>" are supported.')

    @cached_property
    def domain(self):
        if self.characteristic == 0:
            return QQ
        return GF(self.characteristic, symmetric=False)

    @property
    def name(self):
        return 'Q' if self.characteristic == 0 else f'Fp {self.characteristic}'

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def scalar(self, num, den=1):
        num, den = int(num), int(den)
        if den == 0:
            raise ZeroDivisionError(f'{num}/{den} has a zero denominator')
        if self.characteristic == 0:
            return QQ(num, den)
        if den % self.characteristic == 0:
            raise ZeroDivisionError(f'{num}/{den} is not defined in {self.name}')
        return self.domain(num) / self.domain(den)

    def convert(self, value):
        """Bring an int into this field; elements of other fields are rejected."""
        if isinstance(value, int):
            return self.scalar(value)
        if self.domain.of_type(value):
            return value
        raise FieldMismatchError(f'{value!r} is not an element of {self.name}')

    def is_zero(self, x):
        return self.domain.is_zero(x)

    def rational(self, x):
        """(numerator, denominator) of x, residues normalized into [0, p)."""
        if self.characteristic == 0:
            return int(x.numerator), int(x.denominator)
        return int(x) % self.characteristic, 1

    def format(self, x):
        num, den = self.rational(x)
        return str(num) if den == 1 else f'{num}/{den}'

    def random(self, rng, lo=-2, hi=2):
        return self.scalar(rng.randint(lo, hi))


def same_field(*fields):
    first = fields[0]
    for other in fields[1:]:
        if other != first:
            raise FieldMismatchError(f'{first.name} and {other.name} cannot be mixed')
    return first


def sign(x, odd):
    return -x if odd % 2 else x


# Sparse linear combinations: dict basis index -> nonzero scalar

def lc_add(acc, combo, coeff=None):
    for key, value in combo.items():
        term = value if coeff is None else coeff * value
        total = acc.get(key)
        total = term if total is None else total + term
        if total:
            acc[key] = total
        else:
            acc.pop(key, None)
    return acc


def lc_scale(combo, coeff):
    return {key: coeff * value for key, value in combo.items() if coeff * value}


def lc_sign(combo, odd):
    if odd % 2:
        return {key: -value for key, value in combo.items()}
    return dict(combo)


# Dense matrices

def zeros(rows, cols, field):
    return DomainMatrix.zeros((rows, cols), field.domain).to_dense()


def identity(n, field):
    return DomainMatrix.eye(n, field.domain).to_dense()


def matrix(rows, nrows, ncols, field):
    if nrows == 0 or ncols == 0:
        return zeros(nrows, ncols, field)
    if len(rows) != nrows or any(len(row) != ncols for row in rows):
        raise ShapeMismatchError(f'rows do not form a {nrows}x{ncols} matrix')
    return DomainMatrix([[field.convert(x) for x in row] for row in rows], (nrows, ncols), field.domain)


def as_matrix(m, field):
    if isinstance(m, DomainMatrix):
        if m.domain != field.domain:
            raise FieldMismatchError(f'matrix over {m.domain} used as a matrix over {field.name}')
        return m
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    return matrix(m, nrows, ncols, field)


def from_columns(columns, nrows, field):
    ncols = len(columns)
    return matrix([[columns[j][i] for j in range(ncols)] for i in range(nrows)], nrows, ncols, field)


def entries(m):
    rows, cols = m.shape
    if rows == 0:
        return []
    if cols == 0:
        return [[] for _ in range(rows)]
    return m.to_list()


def column(m, j):
    return [row[j] for row in entries(m)]


def matmul(a, b):
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f'cannot multiply {a.shape} by {b.shape}')
    if 0 in a.shape or 0 in b.shape:
        return DomainMatrix.zeros((a.shape[0], b.shape[1]), a.domain).to_dense()
    return a * b


def matadd(a, b):
    if a.shape != b.shape:
        raise ShapeMismatchError(f'cannot add {a.shape} and {b.shape}')
    if 0 in a.shape:
        return a
    return a + b


def matscale(a, c):
    if 0 in a.shape:
        return a
    return a * c


def matequal(a, b):
    return a.shape == b.shape and entries(a) == entries(b)


def is_zero_matrix(a):
    return all(not x for row in entries(a) for x in row)


# Row reduction

def rref(rows, ncols, field):
    """Reduced row echelon form of a list of rows; returns (nonzero rows, pivots)."""
    if not rows or ncols == 0:
        return [], ()
    m = DomainMatrix([list(row) for row in rows], (len(rows), ncols), field.domain)
    reduced, pivots = m.rref()
    return entries(reduced)[:len(pivots)], tuple(pivots)


def kernel_from_rref(reduced, pivots, ncols, field):
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for j in free:
        v = [field.zero] * ncols
        v[j] = field.one
        for row, p in zip(reduced, pivots):
            v[p] = -row[j]
        basis.append(v)
    return basis


def rank_kernel_image(m, field):
    """Exact rank, kernel basis and image basis (both echelonized, leftmost pivots)."""
    m = as_matrix(m, field)
    nrows, ncols = m.shape
    reduced, pivots = rref(entries(m), ncols, field)
    kernel = kernel_from_rref(reduced, pivots, ncols, field)
    columns = [column(m, j) for j in range(ncols)]
    image, _ = rref(columns, nrows, field)
    return len(pivots), kernel, image


def kernel(m, field):
    return rank_kernel_image(m, field)[1]


def rank(m, field):
    m = as_matrix(m, field)
    return len(rref(entries(m), m.shape[1], field)[1])


def solve_linear(m, b, field):
    """One solution of m x = b with free variables set to zero, or None."""
    m = as_matrix(m, field)
    nrows, ncols = m.shape
    if len(b) != nrows:
        raise ShapeMismatchError(f'right-hand side of length {len(b)} for a {nrows}x{ncols} system')
    b = [field.convert(x) for x in b]
    augmented = [row + [b[i]] for i, row in enumerate(entries(m))]
    reduced, pivots = rref(augmented, ncols + 1, field)
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[ncols]
    return x


class Subspace:
    """Subspace of K^n kept in reduced echelon form.

    Every basis row has a one at its pivot and zeros at the other pivots, so
    coordinates are read off at the pivot positions and the non-pivot
    positions index a complement.
    """

    def __init__(self, vectors, ambient, field):
        self.ambient = ambient
        self.field = field
        self.basis, self.pivots = rref([list(v) for v in vectors], ambient, field)

    @property
    def dim(self):
        return len(self.pivots)

    @cached_property
    def complement(self):
        pivots = set(self.pivots)
        return tuple(j for j in range(self.ambient) if j not in pivots)

    def reduce(self, v):
        v = list(v)
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                v = [x - c * y for x, y in zip(v, row)]
        return v

    def contains(self, v):
        return not any(self.reduce(v))

    def coordinates(self, v):
        if not self.contains(v):
            raise ValueError('vector is not in the span of the basis')
        return [v[p] for p in self.pivots]

    def quotient_coordinates(self, v):
        r = self.reduce(v)
        return [r[j] for j in self.complement]

    def extend(self, vectors):
        """Vectors (in order) that are independent of this subspace and of each other."""
        current = Subspace(self.basis, self.ambient, self.field)
        chosen = []
        for v in vectors:
            if not current.contains(v):
                chosen.append(list(v))
                current = Subspace(current.basis + [list(v)], self.ambient, self.field)
        return chosen


def quotient_basis(relations, ambient, field):
    """Echelon complement of span(relations); returns (subspace, representative indices)."""
    sub = Subspace(relations, ambient, field)
    return sub, sub.complement


# Graded spaces and maps

@dataclass(frozen=True, eq=False)
class GradedSpace:
    labels: dict

    def __post_init__(self):
        for n, names in self.labels.items():
            if len(set(names)) != len(names):
                raise ValueError(f'basis labels repeat in degree {n}: {names}')

    @classmethod
    def from_degrees(cls, labels):
        return cls({int(n): tuple(names) for n, names in sorted(labels.items()) if names})

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.labels == other.labels

    def dim(self, n):
        return len(self.labels.get(n, ()))

    @property
    def degrees(self):
        return sorted(self.labels)

    @property
    def window(self):
        if not self.labels:
            return None
        return min(self.labels), max(self.labels)

    @property
    def total_dim(self):
        return sum(len(names) for names in self.labels.values())

    def index(self, n, label):
        return self.labels[n].index(label)


def graded_direct_sum(v, w, tags=('0', '1')):
    degrees = set(v.labels) | set(w.labels)
    return GradedSpace.from_degrees({
        n: [f'<{x}|{tags[0]}>' for x in v.labels.get(n, ())] + [f'<{y}|{tags[1]}>' for y in w.labels.get(n, ())]
        for n in degrees})


@dataclass(frozen=True, eq=False)
class GradedMap:
    """Degree-d map; blocks[n] sends source degree n to target degree n + d."""
    source: GradedSpace
    target: GradedSpace
    degree: int
    blocks: dict
    field: Field

    def __post_init__(self):
        for n, block in self.blocks.items():
            expected = (self.target.dim(n + self.degree), self.source.dim(n))
            if block.shape != expected:
                raise ShapeMismatchError(f'block in degree {n} has shape {block.shape}, expected {expected}')

    def block(self, n):
        block = self.blocks.get(n)
        if block is None:
            return zeros(self.target.dim(n + self.degree), self.source.dim(n), self.field)
        return block

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        if self.degree != other.degree:
            return self.is_zero() and other.is_zero()
        return all(matequal(self.block(n), other.block(n)) for n in self.source.degrees)

    def is_zero(self):
        return all(is_zero_matrix(self.block(n)) for n in self.source.degrees)

    def __add__(self, other):
        if self.degree != other.degree or self.source != other.source or self.target != other.target:
            raise ShapeMismatchError('only maps of one shape and degree can be added')
        return GradedMap(self.source, self.target, self.degree,
                         {n: matadd(self.block(n), other.block(n)) for n in self.source.degrees}, self.field)

    def scale(self, c):
        return GradedMap(self.source, self.target, self.degree,
                         {n: matscale(self.block(n), c) for n in self.source.degrees}, self.field)

    def __neg__(self):
        return self.scale(-self.field.one)

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def zero(cls, source, target, degree, field):
        return cls(source, target, degree, {}, field)

    @classmethod
    def identity(cls, space, field):
        return cls(space, space, 0, {n: identity(space.dim(n), field) for n in space.degrees}, field)


def compose_graded(g, f):
    """g after f; degrees add and the block of g is read at the shifted degree."""
    if f.target != g.source:
        raise ShapeMismatchError('target of the first map is not the source of the second')
    same_field(f.field, g.field)
    blocks = {n: matmul(g.block(n + f.degree), f.block(n)) for n in f.source.degrees}
    return GradedMap(f.source, g.target, f.degree + g.degree, blocks, f.field)


@dataclass(frozen=True)
class Homology:
    dimension: int
    cycles: list
    boundaries: list
    representatives: list


def homology_at(d_in, d_out, n):
    """H^n = ker(d_out at n) / im(d_in at n - 1)."""
    if d_in.degree != 1 or d_out.degree != 1:
        raise NotAComplexError('differentials must have degree +1')
    field = same_field(d_in.field, d_out.field)
    into, out = d_in.block(n - 1), d_out.block(n)
    if not is_zero_matrix(matmul(out, into)):
        raise NotAComplexError(f'd o d is not zero at degree {n - 1}')
    dim = d_out.source.dim(n)
    _, cycles, _ = rank_kernel_image(out, field)
    _, _, boundaries = rank_kernel_image(into, field)
    representatives = Subspace(boundaries, dim, field).extend(cycles)
    log.debug(f'H^{n}: cycles={len(cycles)} boundaries={len(boundaries)}')
    return Homology(len(cycles) - len(boundaries), cycles, boundaries, representatives)


def complex_homology(differential):
    return {n: homology_at(differential, differential, n) for n in differential.source.degrees}


def homology_dims(differential, window=None):
    """Per-degree homology dimensions; degrees with zero chains report 0."""
    table = {n: h.dimension for n, h in complex_homology(differential).items()}
    if window is not None:
        lo, hi = window
        return {n: table.get(n, 0) for n in range(lo, hi + 1)}
    return table
