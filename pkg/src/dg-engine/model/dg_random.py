"""Seeded generators of valid dg algebras and chain maps for law testing."""
import random
import logging

from dg_algebra import BasisElement, DgAlgebra, opposite, tensor_algebras
from dg_config import engine_config
from dg_linalg import Field
from dg_module import DgMorphism

log = logging.getLogger(__name__)

MAX_DIM = 8
DEGREES = (-3, 3)


def truncated_path_algebra(degrees, length, field=None, name='P'):
    """Linear quiver 1 -> 2 -> ... with the given arrow degrees, paths longer than ``length`` set to zero."""
    field = field or Field(0)
    n = len(degrees) + 1
    basis = [BasisElement(f'e{i + 1}', 0, i, i) for i in range(n)]
    paths = {}
    for span in range(1, length + 1):
        for i in range(n - span):
            j = i + span
            paths[(i, j)] = len(basis)
            basis.append(BasisElement(f'p{i + 1}{j + 1}', sum(degrees[i:j]), i, j))
    mul = {}
    for (i, j), p in paths.items():
        for (k, l), q in paths.items():
            if j == k and (i, l) in paths:
                mul[(p, q)] = {paths[(i, l)]: field.one}
    return DgAlgebra(field, basis, list(range(n)), mul, name=name)


def loop_algebra(length, degree, c=0, field=None, name='L'):
    """k[x]/(x^{length+1}); with |x| = 1, d(x^k) = c x^{k+1} for odd k."""
    field = field or Field(0)
    if c and degree != 1:
        raise ValueError(f'a differential needs |x| = 1, not {degree}')
    labels = ['e', 'x'] + [f'x{k}' for k in range(2, length + 1)]
    basis = [BasisElement(label, k * degree, 0, 0) for k, label in enumerate(labels)]
    mul = {}
    for i in range(1, length + 1):
        for j in range(1, length + 1):
            if i + j <= length:
                mul[(i, j)] = {i + j: field.one}
    diff = {}
    if c:
        for k in range(1, length, 2):
            diff[k] = {k + 1: field.scalar(c)}
    return DgAlgebra(field, basis, [0], mul, diff, name=name)


def radical_square_zero(rng, field=None, name='R'):
    """Random quiver with all products of arrows zero; parallel pairs of degree d, d+1 carry d(x) = c y."""
    field = field or Field(0)
    n = rng.randint(1, 3)
    basis = [BasisElement(f'e{i + 1}', 0, i, i) for i in range(n)]
    diff = {}
    while len(basis) < MAX_DIM and rng.random() < 0.8:
        s, t = rng.randrange(n), rng.randrange(n)
        label = f'x{len(basis) - n + 1}'
        if len(basis) + 2 <= MAX_DIM and rng.random() < 0.5:
            degree = rng.randint(DEGREES[0] + 1, DEGREES[1] - 2)
            basis.append(BasisElement(label, degree, s, t))
            basis.append(BasisElement(f'{label}d', degree + 1, s, t))
            diff[len(basis) - 2] = {len(basis) - 1: field.scalar(rng.choice([1, -1, 2, 3]))}
        else:
            basis.append(BasisElement(label, rng.randint(DEGREES[0] + 1, DEGREES[1] - 1), s, t))
    return DgAlgebra(field, basis, list(range(n)), diff=diff, name=name)


def derived_algebras(fixtures):
    """Opposites and small tensor products of the fixture algebras."""
    a2, lam, d = fixtures['A2'], fixtures['Lambda'], fixtures['D']
    return [opposite(d), opposite(lam), opposite(a2), tensor_algebras(lam, lam), tensor_algebras(a2, lam),
            tensor_algebras(lam, d)]


def random_algebras(count=20, seed=None, fixtures=None):
    """At least ``count`` valid dg algebras of dimension <= 8 inside the degree window [-3, 3]."""
    seed = engine_config().default_seed if seed is None else seed
    rng = random.Random(seed)
    result = [loop_algebra(3, 1, 1, name='L3d'), loop_algebra(2, -1, name='L2'), loop_algebra(3, 0, name='L3'),
              truncated_path_algebra([0, 1], 2, name='P3'), truncated_path_algebra([1, -1, 0], 1, name='P4')]
    if fixtures is not None:
        result += derived_algebras(fixtures)
    k = 0
    while len(result) < count:
        k += 1
        kind = rng.choice(['quiver', 'quiver', 'path', 'loop'])
        if kind == 'quiver':
            result.append(radical_square_zero(rng, name=f'R{k}'))
        elif kind == 'path':
            arrows = rng.randint(1, 2)
            result.append(truncated_path_algebra([rng.randint(-1, 1) for _ in range(arrows)], rng.randint(1, arrows),
                                                 name=f'P{k}'))
        else:
            result.append(loop_algebra(rng.randint(1, 3), 1, rng.choice([0, 1, -2]), name=f'L{k}'))
    log.debug(f'generated {len(result)} algebras with seed {seed}')
    return result


def random_chain_map(hom, rng):
    """Random degree-0 cycle of a Hom-complex: a combination of its echelon cycle basis."""
    lo, hi = engine_config().random_coefficients
    f = DgMorphism(hom.source, hom.target, 0, {}, name='f')
    for z in hom.cycles(0):
        f = f + z.scale(hom.field.random(rng, lo, hi))
    f.name = 'f'
    return f
