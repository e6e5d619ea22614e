import logging
import random
from dataclasses import dataclass, field as dc_field
from typing import Optional

from dg_config import engine_config
from dg_errors import SideMismatchError
from dg_homtensor import TensorOverB, overline_hom, overline_hom_left, precompose, postcompose, tensor_modules, \
    tensor_on_morphisms
from dg_linalg import from_columns, lc_add, lc_sign, rank
from dg_module import (DgModule, DgMorphism, ModuleElement, as_bimodule, check_morphism, compose_morphisms,
                       hom_complex, is_chain_map, morphism_differential)

log = logging.getLogger(__name__)


@dataclass
class DgAdjunctionCertificate:
    name: str
    lhs_dims: dict
    rhs_dims: dict
    comparison: dict
    bijective: bool
    natural_first: bool
    natural_second: bool
    differential_compatible: bool
    witness: list = dc_field(default_factory=list)
    panel_size: int = 0
    seed: int = 0
    inverse_ok: Optional[bool] = None
    field: object = None

    @property
    def valid(self):
        flags = [self.bijective, self.natural_first, self.natural_second, self.differential_compatible]
        if self.inverse_ok is not None:
            flags.append(self.inverse_ok)
        return all(flags)

    def to_dict(self):
        fmt = self.field.format if self.field is not None else str
        return {
            'name': self.name,
            'valid': self.valid,
            'bijective': self.bijective,
            'natural_first': self.natural_first,
            'natural_second': self.natural_second,
            'differential_compatible': self.differential_compatible,
            'inverse_ok': self.inverse_ok,
            'lhs_dims': {str(n): d for n, d in sorted(self.lhs_dims.items())},
            'rhs_dims': {str(n): d for n, d in sorted(self.rhs_dims.items())},
            'comparison': {str(n): [[fmt(c) for c in col] for col in cols]
                           for n, cols in sorted(self.comparison.items())},
            'panel_size': self.panel_size,
            'seed': self.seed,
            'witness': list(self.witness),
        }


@dataclass
class IsoCertificate:
    name: str
    forward: DgMorphism
    backward: DgMorphism
    mutual_inverse: bool
    chain_map: bool
    linear: bool
    dims: dict = dc_field(default_factory=dict)

    @property
    def valid(self):
        return self.mutual_inverse and self.chain_map and self.linear

    def to_dict(self):
        return {'name': self.name, 'valid': self.valid, 'mutual_inverse': self.mutual_inverse,
                'chain_map': self.chain_map, 'linear': self.linear,
                'dims': {str(n): d for n, d in sorted(self.dims.items())}}


def random_morphism(hom, rng, degree=None):
    """Random homogeneous element of a Hom-space, coefficients in the configured range."""
    lo, hi = engine_config().random_coefficients
    degrees = hom.degrees
    if degree is None:
        if not degrees:
            return DgMorphism(hom.source, hom.target, 0, {})
        degree = rng.choice(degrees)
    coefficients = [hom.field.random(rng, lo, hi) for _ in range(hom.dim(degree))]
    return hom.morphism(degree, coefficients)


def comparison_matrix(lhs, rhs, transform):
    """Per degree, the columns of rhs-coordinates of transform(f) over the lhs echelon basis."""
    return {n: [rhs.coordinates(transform(f)) for f in lhs.basis_maps(n)] for n in lhs.degrees}


def _bijective(lhs, rhs, columns):
    if lhs.dims() != rhs.dims():
        return False
    return all(rank(from_columns(cols, rhs.dim(n), lhs.field), lhs.field) == rhs.dim(n)
               for n, cols in columns.items())


def _differential_compatible(lhs, transform, witness):
    for n in lhs.degrees:
        for k, f in enumerate(lhs.basis_maps(n)):
            if morphism_differential(transform(f)) != transform(morphism_differential(f)):
                witness.append(f'differential fails on basis map {k} of degree {n}')
                return False
    return True


def _panel(seed, panel):
    config = engine_config()
    seed = config.default_seed if seed is None else seed
    panel = config.naturality_panel if panel is None else panel
    return random.Random(seed), seed, panel


def eta(u, x, m, seed=None, panel=None):
    """[eta(f)(u)](x) = f(u (x) x): HOM_{C-A}(U (x)_B X, M) -> HOM_{C-B}(U, HOM_A(X, M))."""
    rng, seed, panel = _panel(seed, panel)
    one = u.field.one
    tensor = TensorOverB(u, x)
    inner = overline_hom(x, m)
    lhs = hom_complex(tensor.module, m)
    rhs = hom_complex(u, inner.module)

    def transform(f):
        images = {}
        for i in range(u.dim):
            g_images = {}
            for j in range(x.dim):
                value = f.apply(tensor.element({i: one}, {j: one}))
                if value:
                    g_images[j] = value
            g = DgMorphism(x, m, f.degree + u.degree(i), g_images, name='g')
            value = inner.element(g)
            if value:
                images[i] = value
        return DgMorphism(u, inner.module, f.degree, images, name=f'eta({f.name})')

    columns = comparison_matrix(lhs, rhs, transform)
    witness = []
    bijective = _bijective(lhs, rhs, columns)
    if not bijective:
        witness.append(f'dims {lhs.dims()} against {rhs.dims()}')
    compatible = _differential_compatible(lhs, transform, witness)
    ends_u, ends_m = hom_complex(u, u), hom_complex(m, m)
    natural_first = natural_second = True
    for trial in range(panel):
        f = random_morphism(lhs, rng)
        phi = random_morphism(ends_u, rng)
        pulled = compose_morphisms(f, tensor_on_morphisms(phi, x.identity(), tensor, tensor))
        if transform(pulled) != compose_morphisms(transform(f), phi):
            natural_first = False
            witness.append(f'naturality in U fails at trial {trial}')
        psi = random_morphism(ends_m, rng)
        if transform(compose_morphisms(psi, f)) != compose_morphisms(postcompose(inner, psi), transform(f)):
            natural_second = False
            witness.append(f'naturality in M fails at trial {trial}')
    log.info(f'eta on ({u.name}, {x.name}, {m.name}): bijective={bijective} compatible={compatible}')
    return DgAdjunctionCertificate('eta', lhs.dims(), rhs.dims(), columns, bijective, natural_first,
                                   natural_second, compatible, witness, panel, seed, field=u.field)


def xi(u, m, x, seed=None, panel=None):
    """[xi(f)(u)](m) = (-1)^{|u||m|} f(m)(u): HOM_{C-A}(M, HOM_B(U, X)) -> HOM_{B-C}(U, HOM_A(M, X)).

    The inverse is [xi'(g)(m)](u) = (-1)^{|u||m|} g(u)(m).
    """
    rng, seed, panel = _panel(seed, panel)
    one = u.field.one
    left = overline_hom_left(u, x)
    right = overline_hom(m, x)
    lhs = hom_complex(m, left.module)
    rhs = hom_complex(u, right.module)

    def forward(f):
        images = {}
        for i in range(u.dim):
            g_images = {}
            for j in range(m.dim):
                h = left.morphism(f.image(j), f.degree + m.degree(j))
                value = lc_sign(h.apply({i: one}), u.degree(i) * m.degree(j))
                if value:
                    g_images[j] = value
            value = right.element(DgMorphism(m, x, f.degree + u.degree(i), g_images, name='g'))
            if value:
                images[i] = value
        return DgMorphism(u, right.module, f.degree, images, name=f'xi({f.name})')

    def backward(g):
        images = {}
        for j in range(m.dim):
            k_images = {}
            for i in range(u.dim):
                h = right.morphism(g.image(i), g.degree + u.degree(i))
                value = lc_sign(h.apply({j: one}), u.degree(i) * m.degree(j))
                if value:
                    k_images[i] = value
            value = left.element(DgMorphism(u, x, g.degree + m.degree(j), k_images, name='k'))
            if value:
                images[j] = value
        return DgMorphism(m, left.module, g.degree, images, name=f"xi'({g.name})")

    columns = comparison_matrix(lhs, rhs, forward)
    witness = []
    bijective = _bijective(lhs, rhs, columns)
    if not bijective:
        witness.append(f'dims {lhs.dims()} against {rhs.dims()}')
    inverse_ok = all(backward(forward(f)) == f for n in lhs.degrees for f in lhs.basis_maps(n)) and \
        all(forward(backward(g)) == g for n in rhs.degrees for g in rhs.basis_maps(n))
    if not inverse_ok:
        witness.append("xi' is not inverse to xi")
    compatible = _differential_compatible(lhs, forward, witness)
    ends_u, ends_m = hom_complex(u, u), hom_complex(m, m)
    natural_first = natural_second = True
    for trial in range(panel):
        f = random_morphism(lhs, rng)
        psi = random_morphism(ends_u, rng)
        lhs_value = forward(compose_morphisms(precompose(left, psi), f))
        rhs_value = compose_morphisms(forward(f), psi)
        if psi.degree * f.degree % 2:
            rhs_value = -rhs_value
        if lhs_value != rhs_value:
            natural_first = False
            witness.append(f'naturality in U fails at trial {trial}')
        chi = random_morphism(ends_m, rng)
        pulled = compose_morphisms(f, chi)
        if chi.degree * f.degree % 2:
            pulled = -pulled
        if forward(pulled) != compose_morphisms(precompose(right, chi), forward(f)):
            natural_second = False
            witness.append(f'naturality in M fails at trial {trial}')
    log.info(f'xi on ({u.name}, {m.name}, {x.name}): bijective={bijective} inverse={inverse_ok}')
    return DgAdjunctionCertificate('xi', lhs.dims(), rhs.dims(), columns, bijective, natural_first, natural_second,
                                   compatible, witness, panel, seed, inverse_ok=inverse_ok, field=u.field)


def twisted_regular(iota, side='left'):
    """The target algebra of iota as a bimodule, the source acting through iota on one side.

    side='left' gives B-A for iota: B -> A; side='right' gives B-A for iota: A -> B.
    """
    a = iota.target
    positions = iota.right_idempotent_map()
    one = a.field.one
    basis, act, lact = [], {}, {}
    for i, b in enumerate(a.basis):
        if side == 'left':
            basis.append(ModuleElement(b.label, b.degree, positions[b.left], b.right))
        else:
            basis.append(ModuleElement(b.label, b.degree, b.left, positions[b.right]))
    for i in range(a.dim):
        for j in a.non_idempotents:
            if side == 'left':
                value = a.product(i, j)
                if value:
                    act[(i, j)] = value
            else:
                value = a.product(j, i)
                if value:
                    lact[(j, i)] = value
        for s in iota.source.non_idempotents:
            if side == 'left':
                value = a.multiply(iota.images.get(s, {}), {i: one})
                if value:
                    lact[(s, i)] = value
            else:
                value = a.multiply({i: one}, iota.images.get(s, {}))
                if value:
                    act[(i, s)] = value
    if side == 'left':
        return DgModule(basis, right_algebra=a, left_algebra=iota.source, act=act, lact=lact, diff=a.diff,
                        name=f'{a.name}_{iota.name}')
    return DgModule(basis, right_algebra=iota.source, left_algebra=a, act=act, lact=lact, diff=a.diff,
                    name=f'{a.name}_{iota.name}')


def restrict_scalars(iota, m):
    """iota_* M: the right action of A pulled back along iota: B -> A."""
    if m.right_algebra is None:
        raise SideMismatchError(f'{m.name} has no right action to restrict')
    positions = iota.right_idempotent_map()
    one = m.field.one
    basis = [ModuleElement(x.label, x.degree, x.left, positions[x.right]) for x in m.basis]
    act = {}
    for i in range(m.dim):
        for b in iota.source.non_idempotents:
            value = m.act_right({i: one}, iota.images.get(b, {}))
            if value:
                act[(i, b)] = value
    return DgModule(basis, right_algebra=iota.source, left_algebra=m.left_algebra, act=act, lact=m.lact,
                    diff=m.diff, name=f'{iota.name}_*{m.name}')


def extend_scalars(iota, m):
    """M (x)_B A for iota: B -> A."""
    _, module = tensor_modules(m, twisted_regular(iota, 'left'))
    return module


def lambda_iso(iota, m):
    """lambda: iota_* M -> HOM_A(A, M), lambda_m(a) = ma, with inverse Psi(f) = sum_i f(e_i)."""
    m = as_bimodule(m)
    a = iota.target
    one = m.field.one
    regular = twisted_regular(iota, 'left')
    space = overline_hom(regular, m)
    pushed = restrict_scalars(iota, m)
    images = {}
    for i in range(m.dim):
        lam = DgMorphism(regular, m, m.degree(i),
                         {j: m.act_right({i: one}, {j: one}) for j in range(a.dim)}, name='lambda_m')
        value = space.element(lam)
        if value:
            images[i] = value
    forward = DgMorphism(pushed, space.module, 0, images, name='lambda')
    images = {}
    for g in range(space.module.dim):
        value = {}
        f = space.basis_map(g)
        for e in a.idempotents:
            lc_add(value, f.image(e))
        if value:
            images[g] = value
    backward = DgMorphism(space.module, pushed, 0, images, name='Psi')
    mutual = compose_morphisms(backward, forward) == pushed.identity() and \
        compose_morphisms(forward, backward) == space.module.identity()
    certificate = IsoCertificate('lambda', forward, backward, mutual, is_chain_map(forward),
                                 not check_morphism(forward) and not check_morphism(backward),
                                 dims={n: pushed.space.dim(n) for n in pushed.space.degrees})
    log.info(f'lambda for {iota.name} on {m.name}: valid={certificate.valid}')
    return certificate


def extension_restriction_certificate(iota, u, m, seed=None, panel=None):
    """HOM_A(U (x)_B A, M) = HOM_B(U, iota_* M): eta for (U, A, M) followed by lambda."""
    u, m = as_bimodule(u), as_bimodule(m)
    regular = twisted_regular(iota, 'left')
    first = eta(u, regular, m, seed=seed, panel=panel)
    second = lambda_iso(iota, m)
    restricted = hom_complex(u, restrict_scalars(iota, m))
    dims_ok = restricted.dims() == first.rhs_dims
    witness = list(first.witness)
    if not second.valid:
        witness.append('lambda is not an isomorphism')
    if not dims_ok:
        witness.append(f'HOM_B(U, iota_* M) has dims {restricted.dims()}')
    return DgAdjunctionCertificate('extension-restriction', first.lhs_dims, restricted.dims(), first.comparison,
                                   first.bijective and second.valid and dims_ok, first.natural_first,
                                   first.natural_second, first.differential_compatible and second.chain_map,
                                   witness, first.panel_size, first.seed, field=u.field)

