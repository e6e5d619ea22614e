import logging
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Optional, Union

from dg_adjunctions import twisted_regular
from dg_config import engine_config
from dg_errors import InvalidStructureError, NotAChainMapError, PreconditionError, SideMismatchError
from dg_homtensor import TensorOverB, overline_hom, overline_hom_left
from dg_linalg import lc_add, lc_sign
from dg_module import (DgMorphism, as_bimodule, check_morphism, compose_morphisms, cone, drop_side, hom_complex,
                       homology_dims, is_acyclic, is_chain_map, is_isomorphism, is_quasi_iso, left_projective,
                       left_representable, regular_bimodule, representable, same_module, shift, zero_module)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Leaf:
    idempotent: int
    shift: int = 0


@dataclass(frozen=True)
class ConeNode:
    source: int
    target: int
    attaching: object = None


Node = Union[Leaf, ConeNode]


@dataclass
class SemifreeTree:
    """Iterated cones of shifted representables e_iA[k]; the last node is the root.

    Cone nodes refer to earlier nodes by position; their attaching morphism goes
    from the realized source node to the realized target node.
    """
    algebra: object
    nodes: list
    name: str = 'P'

    def depth(self, position=None):
        position = len(self.nodes) - 1 if position is None else position
        node = self.nodes[position]
        if isinstance(node, Leaf):
            return 1
        return 1 + max(self.depth(node.source), self.depth(node.target))

    def describe(self, position=None):
        position = len(self.nodes) - 1 if position is None else position
        node = self.nodes[position]
        if isinstance(node, Leaf):
            return f'{self.algebra.labels[self.algebra.idempotents[node.idempotent]]}A[{node.shift}]'
        return f'C({self.describe(node.source)} -> {self.describe(node.target)})'


@dataclass
class SemifreeRealization:
    module: object
    tree: SemifreeTree
    nodes: list
    certificate: list = dc_field(default_factory=list)


def realize_semifree(tree, algebra=None):
    """Explicit module for every node, with the h-projectivity provenance of each."""
    a = algebra or tree.algebra
    if not tree.nodes:
        return SemifreeRealization(zero_module(a), tree, [], ['zero module'])
    realized, certificate = [], []
    for position, node in enumerate(tree.nodes):
        if isinstance(node, Leaf):
            if not 0 <= node.idempotent < len(a.idempotents):
                raise InvalidStructureError(f'node {position}: no idempotent at position {node.idempotent}')
            module = shift(representable(a, node.idempotent), node.shift)
            certificate.append(f'node {position}: representable {tree.describe(position)}')
        else:
            if not (0 <= node.source < position and 0 <= node.target < position):
                raise InvalidStructureError(f'node {position}: cones may only refer to earlier nodes')
            f = node.attaching
            source, target = realized[node.source], realized[node.target]
            if f is None:
                f = DgMorphism(source, target, 0, {}, name='0')
            if not (same_module(f.source, source) and same_module(f.target, target)):
                raise InvalidStructureError(f'node {position}: attaching map {f.name} has the wrong shape')
            if not is_chain_map(f):
                raise NotAChainMapError(f'node {position}: attaching map {f.name} is not a chain map')
            f = DgMorphism(source, target, 0, f.images, name=f.name)
            module = cone(f).module
            certificate.append(f'node {position}: cone of nodes {node.source} and {node.target}')
        realized.append(module)
    root = realized[-1]
    root.name = tree.name
    log.info(f'realized {tree.name} = {tree.describe()}: dims {dict((n, root.space.dim(n)) for n in root.space.degrees)}')
    return SemifreeRealization(root, tree, realized, certificate)


def _regular(algebra, x):
    return x if x is not None else regular_bimodule(algebra)


def dual_right(m, x=None):
    """M* = HOM_A(M, X) for a right module M, read as a left module over X's left algebra."""
    if m.side != 'right':
        raise SideMismatchError(f'{m.name} is a {m.side} module, not a right module')
    x = _regular(m.right_algebra, x)
    space = overline_hom(as_bimodule(m), x)
    dual = drop_side(space.module, 'right')
    dual.name = f'{m.name}*'
    return space, dual


def dual_left(u, x=None):
    """U* = HOM_A(U, X) of left-linear maps, read as a right module over X's right algebra."""
    if u.side != 'left':
        raise SideMismatchError(f'{u.name} is a {u.side} module, not a left module')
    x = _regular(u.left_algebra, x)
    space = overline_hom_left(as_bimodule(u), x)
    dual = drop_side(space.module, 'left')
    dual.name = f'{u.name}*'
    return space, dual


def _evaluation(obj, dual_space, double_space, double):
    """u -> (alpha -> (-1)^{|alpha||u|} alpha(u)) into the double dual."""
    one = obj.field.one
    images = {}
    for i in range(obj.dim):
        g_images = {}
        for g in range(dual_space.module.dim):
            alpha = dual_space.basis_map(g)
            value = alpha.apply({i: one})
            if value:
                g_images[g] = lc_sign(value, alpha.degree * obj.degree(i))
        evaluation = DgMorphism(double_space.hom.source, double_space.hom.target, obj.degree(i), g_images, name='ev')
        value = double_space.element(evaluation)
        if value:
            images[i] = value
    return DgMorphism(obj, double, 0, images, name='unit')


def unit_map(u, x=None):
    """The evaluation U -> U** for a left module U."""
    first, dual = dual_left(u, x)
    second, double = dual_right(dual, x)
    return _evaluation(u, first, second, double), dual, double


def counit_map(m, x=None):
    """The evaluation M -> M** for a right module M."""
    first, dual = dual_right(m, x)
    second, double = dual_left(dual, x)
    return _evaluation(m, first, second, double), dual, double


def psi_iso(a, i):
    """Psi: (Ae_i)* -> e_iA, f -> f(e_i)."""
    u = left_representable(a, i)
    space, dual = dual_left(u)
    target = representable(a, i)
    e = u.index(a.labels[a.idempotents[i]])
    images = {}
    for g in range(dual.dim):
        value = space.basis_map(g).image(e)
        if value:
            images[g] = {target.index(a.labels[k]): c for k, c in value.items()}
    return DgMorphism(dual, target, 0, images, name='Psi')


def phi_iso(a, j):
    """Phi: (e_jA)* -> Ae_j, g -> g(e_j)."""
    m = representable(a, j)
    space, dual = dual_right(m)
    target = left_representable(a, j)
    e = m.index(a.labels[a.idempotents[j]])
    images = {}
    for g in range(dual.dim):
        value = space.basis_map(g).image(e)
        if value:
            images[g] = {target.index(a.labels[k]): c for k, c in value.items()}
    return DgMorphism(dual, target, 0, images, name='Phi')


def unit_factorization(a, j):
    """Psi^* o Phi^{-1} on Ae_j, as a map into (Ae_j)**, for comparison with the unit."""
    u = left_representable(a, j)
    _, dual = dual_left(u)
    second, double = dual_right(dual)
    psi = psi_iso(a, j)
    m = representable(a, j)
    images = {}
    for i in range(u.dim):
        # Phi^{-1}(u_i) sends x in e_jA to u_i x
        g = {k: a.product(a.index(u.labels[i]), a.index(m.labels[k])) for k in range(m.dim)}
        pulled = {}
        for h in range(dual.dim):
            value = {}
            for k, c in psi.image(h).items():
                lc_add(value, g[k], c)
            if value:
                pulled[h] = value
        value = second.element(DgMorphism(second.hom.source, second.hom.target, u.degree(i), pulled, name='gPsi'))
        if value:
            images[i] = value
    return DgMorphism(u, double, 0, images, name='Psi*Phi^-1')


@dataclass
class DualityCertificate:
    object: str
    side: str
    dual_dims: dict
    double_dims: dict
    homology: dict
    dual_homology: dict
    double_homology: dict
    unit: Optional[DgMorphism]
    chain_map: bool
    quasi_iso: bool
    isomorphism: bool

    @property
    def reflexive(self):
        return self.chain_map and self.quasi_iso

    def to_dict(self):
        def table(d):
            return {str(n): v for n, v in sorted(d.items())}

        return {'object': self.object, 'side': self.side, 'reflexive': self.reflexive,
                'chain_map': self.chain_map, 'quasi_iso': self.quasi_iso, 'isomorphism': self.isomorphism,
                'dual_dims': table(self.dual_dims), 'double_dims': table(self.double_dims),
                'homology': table(self.homology), 'dual_homology': table(self.dual_homology),
                'double_homology': table(self.double_homology)}


def _dims(m):
    return {n: m.space.dim(n) for n in m.space.degrees}


def _homology(m):
    return {n: d for n, d in homology_dims(m).items() if d}


def duality_check(m, x=None):
    """Builds M*, M** and the evaluation map; the verdict is whether it is a quasi-isomorphism."""
    if m.side == 'left':
        unit, dual, double = unit_map(m, x)
    elif m.side == 'right':
        unit, dual, double = counit_map(m, x)
    else:
        raise SideMismatchError('duality_check takes a one-sided module')
    chain = is_chain_map(unit)
    quasi = chain and is_quasi_iso(unit)
    certificate = DualityCertificate(m.name, m.side, _dims(dual), _dims(double), _homology(m), _homology(dual),
                                     _homology(double), unit, chain, quasi, chain and is_isomorphism(unit))
    log.info(f'duality check on {m.name}: reflexive={certificate.reflexive}')
    return certificate


@dataclass
class BaseChangeReport:
    eta: DgMorphism
    chain_map: bool
    isomorphism: bool
    quasi_iso: bool
    factorization: Optional[bool] = None

    @property
    def valid(self):
        return self.chain_map and self.quasi_iso and self.factorization is not False

    def to_dict(self):
        return {'chain_map': self.chain_map, 'isomorphism': self.isomorphism, 'quasi_iso': self.quasi_iso,
                'factorization': self.factorization, 'valid': self.valid,
                'source_dims': {str(n): d for n, d in sorted(_dims(self.eta.source).items())},
                'target_dims': {str(n): d for n, d in sorted(_dims(self.eta.target).items())}}


def _relabel(value, b, column):
    return {column.index(b.labels[k]): c for k, c in value.items()}


def _column_maps(iota, m, i, lhs, dual_space, tensor, rhs_space, eta_map):
    """For M = e_iA, mu: b (x) f -> b iota(f(e_i)) and rho: h -> h(e_i (x) iota(e_i)), both into B iota(e_i)."""
    a, b = iota.source, iota.target
    one = b.field.one
    e = m.index(a.labels[a.idempotents[i]])
    column = left_projective(b, iota.idempotent_support()[i])
    images = {}
    for n in sorted(lhs.representatives):
        for r, (bi, g) in enumerate(lhs.representatives[n]):
            value = b.multiply({bi: one}, iota.apply(dual_space.basis_map(g).image(e)))
            if value:
                images[lhs._module_index[(n, r)]] = _relabel(value, b, column)
    mu = DgMorphism(eta_map.source, column, 0, images, name='mu(1(x)Phi)')
    generator = tensor.element({e: one}, iota.apply({a.idempotents[i]: one}))
    images = {}
    for h in range(rhs_space.module.dim):
        value = rhs_space.basis_map(h).apply(generator)
        if value:
            images[h] = _relabel(value, b, column)
    rho = DgMorphism(eta_map.target, column, 0, images, name='rho')
    return mu, rho


def base_change_eta(iota, m, representable_idempotent=None):
    """eta_M: B (x)_A M* -> (M (x)_A B)*, eta(b (x) f)(m (x) b') = b iota(f(m)) b', for iota: A -> B.

    With representable_idempotent set, M must be e_iA and eta_M is also compared with
    the composite of the two canonical isomorphisms onto B iota(e_i).
    """
    if m.side != 'right':
        raise SideMismatchError(f'{m.name} must be a right module')
    b = iota.target
    one = b.field.one
    dual_space, dual = dual_right(m)
    b_left = twisted_regular(iota, 'right')
    lhs = TensorOverB(b_left, as_bimodule(dual))
    b_right = twisted_regular(iota, 'left')
    tensor = TensorOverB(as_bimodule(m), b_right)
    pushed = drop_side(tensor.module, 'left')
    rhs_space, rhs = dual_right(pushed)
    lhs_module = drop_side(lhs.module, 'right')
    images = {}
    for n in sorted(lhs.representatives):
        for r, (bi, g) in enumerate(lhs.representatives[n]):
            f = dual_space.basis_map(g)
            g_images = {}
            for tn in sorted(tensor.representatives):
                for tr, (mi, bj) in enumerate(tensor.representatives[tn]):
                    value = b.multiply(b.multiply({bi: one}, iota.apply(f.image(mi))), {bj: one})
                    if value:
                        g_images[tensor._module_index[(tn, tr)]] = value
            h = DgMorphism(rhs_space.hom.source, rhs_space.hom.target, b.degree(bi) + f.degree, g_images, name='h')
            value = rhs_space.element(h)
            if value:
                images[lhs._module_index[(n, r)]] = value
    eta_map = DgMorphism(lhs_module, rhs, 0, images, name='eta_M')
    chain = is_chain_map(eta_map) and not check_morphism(eta_map)
    iso = chain and is_isomorphism(eta_map)
    factorization = None
    if representable_idempotent is not None:
        i = representable_idempotent
        if not same_module(m, representable(iota.source, i)):
            raise PreconditionError(f'{m.name} is not the representable module of idempotent {i}')
        mu, rho = _column_maps(iota, m, i, lhs, dual_space, tensor, rhs_space, eta_map)
        factorization = is_isomorphism(mu) and is_isomorphism(rho) and compose_morphisms(rho, eta_map) == mu
        iso = iso and factorization
    report = BaseChangeReport(eta_map, chain, iso, chain and is_quasi_iso(eta_map), factorization)
    log.info(f'base change along {iota.name} on {m.name}: iso={iso} quasi_iso={report.quasi_iso}')
    return report


def enumerate_attachings(p, q):
    """Degree-0 cycles P -> Q: zero, each echelon basis cycle, and their sum."""
    cycles = hom_complex(p, q).cycles(0)
    result = [DgMorphism(p, q, 0, {}, name='0')]
    for k, f in enumerate(cycles):
        f.name = f'z{k}'
        result.append(f)
    if len(cycles) > 1:
        total = cycles[0]
        for f in cycles[1:]:
            total = total + f
        total.name = 'zsum'
        result.append(total)
    return result


def enumerate_trees(a, max_depth=None, shifts=None):
    """All trees up to a depth: leaves, then cones with a leaf on one side and a smaller tree on the other."""
    config = engine_config()
    max_depth = config.max_depth if max_depth is None else max_depth
    shifts = config.shifts if shifts is None else shifts
    leaves = [Leaf(i, k) for i, k in product(range(len(a.idempotents)), shifts)]
    level = [SemifreeTree(a, [leaf]) for leaf in leaves]
    yield from level
    for depth in range(2, max_depth + 1):
        following = []
        for tree, leaf in product(level, leaves):
            for leaf_first in (True, False):
                nodes = list(tree.nodes) + [leaf]
                root, extra = len(tree.nodes) - 1, len(tree.nodes)
                source, target = (extra, root) if leaf_first else (root, extra)
                realized = realize_semifree(SemifreeTree(a, nodes))
                for f in enumerate_attachings(realized.nodes[source], realized.nodes[target]):
                    following.append(SemifreeTree(a, nodes + [ConeNode(source, target, f)]))
        yield from following
        level = following


@dataclass
class ConeDualityReport:
    theta: DgMorphism
    chain_map: bool
    isomorphism: bool
    linear: bool

    @property
    def valid(self):
        return self.chain_map and self.isomorphism and self.linear

    def to_dict(self):
        return {'valid': self.valid, 'chain_map': self.chain_map, 'isomorphism': self.isomorphism,
                'linear': self.linear,
                'source_dims': {str(n): d for n, d in sorted(_dims(self.theta.source).items())},
                'target_dims': {str(n): d for n, d in sorted(_dims(self.theta.target).items())}}


def dual_morphism(f, x=None):
    """f*: N* -> M*, alpha -> alpha o f, for a degree-0 map f: M -> N of right modules."""
    source_space, source_dual = dual_right(f.source, x)
    target_space, target_dual = dual_right(f.target, x)
    images = {}
    for g in range(target_dual.dim):
        alpha = target_space.basis_map(g)
        pulled = DgMorphism(source_space.hom.source, source_space.hom.target, alpha.degree,
                            {i: alpha.apply(image) for i, image in f.images.items()}, name='alpha f')
        value = source_space.element(pulled)
        if value:
            images[g] = value
    return DgMorphism(target_dual, source_dual, 0, images, name=f'{f.name}*'), source_space, target_space


def cone_duality_check(f, x=None):
    """theta: cone(f)* -> cone(f*)[-1], gamma -> ((-1)^{|gamma|-1} gamma|_M, gamma|_N).

    cone(f) lists the N part first and M[1] after it; cone(f*) lists M* first and N*[1] after it.
    """
    if f.source.side != 'right':
        raise SideMismatchError('cone_duality_check takes a map of right modules')
    m, n = f.source, f.target
    c_space, c_dual = dual_right(cone(f).module, x)
    f_dual, source_space, target_space = dual_morphism(f, x)
    shifted = shift(cone(f_dual).module, -1)
    offset = f_dual.target.dim
    images = {}
    for g in range(c_dual.dim):
        gamma = c_space.basis_map(g)
        p = gamma.degree
        on_n = DgMorphism(target_space.hom.source, target_space.hom.target, p,
                          {i: gamma.image(i) for i in range(n.dim)}, name='gamma|N')
        on_m = DgMorphism(source_space.hom.source, source_space.hom.target, p - 1,
                          {i: gamma.image(n.dim + i) for i in range(m.dim)}, name='gamma|M')
        value = lc_sign(source_space.element(on_m), p - 1)
        for k, c in target_space.element(on_n).items():
            value[offset + k] = c
        if value:
            images[g] = value
    theta = DgMorphism(c_dual, shifted, 0, images, name='theta')
    chain = is_chain_map(theta)
    report = ConeDualityReport(theta, chain, chain and is_isomorphism(theta), not check_morphism(theta))
    log.info(f'cone duality on {f.name}: valid={report.valid}')
    return report


@dataclass
class AcyclicityReport:
    source: str
    target: str
    homology: dict
    acyclic: bool

    def to_dict(self):
        return {'source': self.source, 'target': self.target, 'acyclic': self.acyclic,
                'homology': {str(n): d for n, d in sorted(self.homology.items())}}


def acyclic_preservation_check(p, x):
    """HOM_A(P, X) is acyclic for a realized semi-free P and an acyclic X."""
    if not isinstance(p, SemifreeRealization):
        raise PreconditionError('the source must be a realized semi-free module')
    if not p.certificate or not realize_semifree(p.tree).module.tables_equal(p.module):
        raise PreconditionError(f'{p.module.name} does not match its semi-free tree')
    if not is_acyclic(x):
        raise PreconditionError(f'{x.name} is not acyclic')
    space = overline_hom(as_bimodule(p.module), as_bimodule(x))
    table = {n: d for n, d in homology_dims(space.module).items() if d}
    return AcyclicityReport(p.module.name, x.name, table, not table)
