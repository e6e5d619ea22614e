import logging
from dataclasses import dataclass
from itertools import product

from dg_config import engine_config
from dg_errors import AlgebraMismatchError, InvalidStructureError, ShapeMismatchError, SideMismatchError
from dg_linalg import Subspace, lc_add, lc_sign, same_field, sign
from dg_module import (DgModule, DgMorphism, HomSpace, ModuleElement, as_bimodule, check_morphism, drop_side,
                       hom_bifunctor_action, is_isomorphism, morphism_differential,
                       regular_bimodule, same_algebra, shift)

log = logging.getLogger(__name__)


class BimoduleHomSpace:
    """A Hom-space together with the bimodule it carries.

    ``module`` numbers the echelon basis maps degree by degree; ``element``
    and ``morphism`` translate between maps and combinations of that basis.
    """

    def __init__(self, hom, module_factory):
        self.hom = hom
        self.order = [(n, k) for n in hom.degrees for k in range(hom.dim(n))]
        self.position = {key: g for g, key in enumerate(self.order)}
        self.module = module_factory(self)

    @property
    def field(self):
        return self.hom.field

    def basis_map(self, g):
        n, k = self.order[g]
        return self.hom.basis_maps(n)[k]

    def element(self, f):
        """Combination of module basis indices representing the map f."""
        return {self.position[(f.degree, k)]: c for k, c in enumerate(self.hom.coordinates(f)) if c}

    def morphism(self, combo, degree):
        result = DgMorphism(self.hom.source, self.hom.target, degree, {})
        for g, c in combo.items():
            if self.order[g][0] != degree:
                raise ShapeMismatchError(f'{self.module.labels[g]} is not of degree {degree}')
            result = result + self.basis_map(g).scale(c)
        return result


def _block_idempotents(f, source_side, target_side):
    """The idempotent pair shared by every nonzero entry of a block-homogeneous map."""
    s, t = f.source, f.target
    found = None
    for x, image in f.images.items():
        for y in image:
            pair = (getattr(t.basis[y], target_side), getattr(s.basis[x], source_side))
            assert found is None or found == pair, f'{f.name} mixes idempotent blocks'
            found = pair
    assert found is not None, 'basis maps are never zero'
    return found


def _build_module(space, left_algebra, right_algebra, left_act, right_act, idempotents, name):
    hom = space.hom
    basis = []
    for g, (n, k) in enumerate(space.order):
        left, right = idempotents(space.basis_map(g))
        basis.append(ModuleElement(hom.space.labels[n][k], n, left, right))
    act, lact, diff = {}, {}, {}
    for g in range(len(space.order)):
        f = space.basis_map(g)
        df = morphism_differential(f)
        if not df.is_zero():
            diff[g] = space.element(df)
        for b in left_algebra.non_idempotents:
            value = space.element(left_act(b, f))
            if value:
                lact[(b, g)] = value
        for c in right_algebra.non_idempotents:
            value = space.element(right_act(f, c))
            if value:
                act[(g, c)] = value
    log.info(f'{name}: {len(basis)} basis maps')
    return DgModule(basis, right_algebra=right_algebra, left_algebra=left_algebra, act=act, lact=lact, diff=diff,
                    name=name)


def overline_hom(m, x):
    """HOM_A(M, X) for a C-A bimodule M and a B-A bimodule X, as a B-C bimodule with (bfc)(m) = b f(cm)."""
    if m.side != 'bimodule' or x.side != 'bimodule':
        raise SideMismatchError('overline_hom takes two bimodules; wrap one-sided modules with as_bimodule')
    if not same_algebra(m.right_algebra, x.right_algebra):
        raise AlgebraMismatchError(f'{m.name} and {x.name} do not share the right algebra')
    one = m.field.one
    b_alg, c_alg = x.left_algebra, m.left_algebra

    def left_act(b, f):
        return DgMorphism(m, x, f.degree + b_alg.degree(b),
                          {i: x.act_left({b: one}, image) for i, image in f.images.items()}, name='bf')

    def right_act(f, c):
        images = {}
        for i in range(m.dim):
            value = f.apply(m.lact.get((c, i), {}))
            if value:
                images[i] = value
        return DgMorphism(m, x, f.degree + c_alg.degree(c), images, name='fc')

    def factory(space):
        return _build_module(space, b_alg, c_alg, left_act, right_act,
                             lambda f: _block_idempotents(f, 'left', 'left'), f'HOM({m.name},{x.name})')

    return BimoduleHomSpace(HomSpace(m, x, right=True, left=False), factory)


def overline_hom_left(w, x):
    """HOM_B(W, X) of left-linear maps for a B-C bimodule W and a B-A bimodule X, as a C-A bimodule.

    (cfa)(w) = (-1)^{(|c|+|a|)|w| + |c||f|} f(wc)a
    """
    if w.side != 'bimodule' or x.side != 'bimodule':
        raise SideMismatchError('overline_hom_left takes two bimodules; wrap one-sided modules with as_bimodule')
    if not same_algebra(w.left_algebra, x.left_algebra):
        raise AlgebraMismatchError(f'{w.name} and {x.name} do not share the left algebra')
    one = w.field.one
    c_alg, a_alg = w.right_algebra, x.right_algebra

    def left_act(c, f):
        images = {}
        for i in range(w.dim):
            value = f.apply(w.act.get((i, c), {}))
            if value:
                images[i] = lc_sign(value, c_alg.degree(c) * (w.degree(i) + f.degree))
        return DgMorphism(w, x, f.degree + c_alg.degree(c), images, name='cf')

    def right_act(f, a):
        images = {i: lc_sign(x.act_right(image, {a: one}), a_alg.degree(a) * w.degree(i))
                  for i, image in f.images.items()}
        return DgMorphism(w, x, f.degree + a_alg.degree(a), images, name='fa')

    def idempotents(f):
        target_right, source_right = _block_idempotents(f, 'right', 'right')
        return source_right, target_right

    def factory(space):
        return _build_module(space, c_alg, a_alg, left_act, right_act, idempotents, f'HOM^l({w.name},{x.name})')

    return BimoduleHomSpace(HomSpace(w, x, right=False, left=True), factory)


class TensorOverB:
    """U (x)_B X as the quotient of U (x)_K X by the span of ub(x)x - u(x)bx.

    Pairs (u, x) with matching middle idempotents span each degree; the
    representatives of the quotient are the pairs off the echelon pivots of
    the relation subspace.
    """

    def __init__(self, u, x, name=None):
        if u.side != 'bimodule' or x.side != 'bimodule':
            raise SideMismatchError('tensor_over takes two bimodules; wrap one-sided modules with as_bimodule')
        if not same_algebra(u.right_algebra, x.left_algebra):
            raise AlgebraMismatchError(f'the middle algebras of {u.name} and {x.name} differ')
        self.field = same_field(u.field, x.field)
        self.u, self.x = u, x
        self.name = name or f'{u.name}(x){x.name}'
        uw, xw = u.space.window, x.space.window
        if uw is not None and xw is not None:
            engine_config().check_window(uw[0] + xw[0], uw[1] + xw[1], self.name)
        self.pairs, self.pair_index, self.relations = {}, {}, {}
        for i, j in product(range(u.dim), range(x.dim)):
            if u.basis[i].right == x.basis[j].left:
                n = u.degree(i) + x.degree(j)
                self.pair_index[(i, j)] = (n, len(self.pairs.setdefault(n, [])))
                self.pairs[n].append((i, j))
        b_alg = u.right_algebra
        relations = {n: [] for n in self.pairs}
        for i, b, j in product(range(u.dim), b_alg.non_idempotents, range(x.dim)):
            if u.basis[i].right != b_alg.basis[b].left or b_alg.basis[b].right != x.basis[j].left:
                continue
            combo = {}
            for k, c in u.act.get((i, b), {}).items():
                lc_add(combo, {(k, j): c})
            for k, c in x.lact.get((b, j), {}).items():
                lc_add(combo, {(i, k): -c})
            if combo:
                n = u.degree(i) + b_alg.degree(b) + x.degree(j)
                relations[n].append(self._vector(combo, n))
        self.relations = {n: Subspace(rows, len(self.pairs[n]), self.field) for n, rows in relations.items()}
        self._check_differential_descends()
        self.representatives = {n: [self.pairs[n][p] for p in sub.complement] for n, sub in self.relations.items()}
        self.module = self._build_module()
        log.info(f'{self.name}: dims {dict((n, len(r)) for n, r in self.representatives.items() if r)}')

    def _vector(self, combo, n):
        v = [self.field.zero] * len(self.pairs.get(n, []))
        for pair, c in combo.items():
            deg, p = self.pair_index[pair]
            if deg != n:
                raise ShapeMismatchError(f'pair {pair} is not in degree {n}')
            v[p] = v[p] + c
        return v

    def _pair_d(self, i, j):
        """d(u(x)x) = du(x)x + (-1)^{|u|} u(x)dx over the pair basis."""
        combo = {}
        for k, c in self.u.diff.get(i, {}).items():
            lc_add(combo, {(k, j): c})
        for k, c in self.x.diff.get(j, {}).items():
            lc_add(combo, {(i, k): sign(c, self.u.degree(i))})
        return combo

    def _check_differential_descends(self):
        for n, sub in self.relations.items():
            for row in sub.basis:
                combo = {}
                for (i, j), c in zip(self.pairs[n], row):
                    if c:
                        lc_add(combo, self._pair_d(i, j), c)
                if combo and not self.relations.get(n + 1, Subspace([], 0, self.field)).contains(
                        self._vector(combo, n + 1)):
                    raise InvalidStructureError(f'the differential of {self.name} does not preserve the relations')

    def reduce(self, combo):
        """Pair combination -> combination of module basis indices."""
        result = {}
        by_degree = {}
        for pair, c in combo.items():
            if pair not in self.pair_index:
                continue
            by_degree.setdefault(self.pair_index[pair][0], {})[pair] = c
        for n, part in by_degree.items():
            coords = self.relations[n].quotient_coordinates(self._vector(part, n))
            for r, c in enumerate(coords):
                if c:
                    result[self._module_index[(n, r)]] = c
        return result

    def element(self, u_combo, x_combo):
        combo = {}
        for i, c in u_combo.items():
            for j, c2 in x_combo.items():
                if (i, j) in self.pair_index:
                    lc_add(combo, {(i, j): c * c2})
        return self.reduce(combo)

    def _build_module(self):
        u, x = self.u, self.x
        one = self.field.one
        self._module_index, basis, reps = {}, [], []
        for n in sorted(self.representatives):
            for r, (i, j) in enumerate(self.representatives[n]):
                self._module_index[(n, r)] = len(basis)
                basis.append(ModuleElement(f'<{u.labels[i]}|{x.labels[j]}>', n, u.basis[i].left, x.basis[j].right))
                reps.append((i, j))
        act, lact, diff = {}, {}, {}
        for g, (i, j) in enumerate(reps):
            value = self.reduce(self._pair_d(i, j))
            if value:
                diff[g] = value
            for c in u.left_algebra.non_idempotents:
                value = self.element(u.act_left({c: one}, {i: one}), {j: one})
                if value:
                    lact[(c, g)] = value
            for a in x.right_algebra.non_idempotents:
                value = self.element({i: one}, x.act_right({j: one}, {a: one}))
                if value:
                    act[(g, a)] = value
        return DgModule(basis, right_algebra=x.right_algebra, left_algebra=u.left_algebra, act=act, lact=lact,
                        diff=diff, name=self.name)


def tensor_over(u, x):
    return TensorOverB(u, x)


def tensor_on_morphisms(alpha, phi, source=None, target=None):
    """T(alpha (x) phi)(u (x) x) = (-1)^{|phi||u|} alpha(u) (x) phi(x) between the tensor products."""
    source = source or TensorOverB(alpha.source, phi.source)
    target = target or TensorOverB(alpha.target, phi.target)
    def on_pair(i, j):
        combo = {}
        for k, c in alpha.image(i).items():
            for l, c2 in phi.image(j).items():
                if (k, l) in target.pair_index:
                    lc_add(combo, {(k, l): sign(c * c2, phi.degree * alpha.source.degree(i))})
        return combo

    for n, sub in source.relations.items():
        for row in sub.basis:
            combo = {}
            for (i, j), c in zip(source.pairs[n], row):
                if c:
                    lc_add(combo, on_pair(i, j), c)
            if target.reduce(combo):
                raise InvalidStructureError(f'{alpha.name}(x){phi.name} does not respect the tensor relations')
    images = {}
    for n in sorted(source.representatives):
        for r, (i, j) in enumerate(source.representatives[n]):
            value = target.reduce(on_pair(i, j))
            if value:
                images[source._module_index[(n, r)]] = value
    return DgMorphism(source.module, target.module, alpha.degree + phi.degree, images,
                      name=f'{alpha.name}(x){phi.name}')


def hom_on_morphisms(alpha, phi, source, target):
    """Map HOM(M, X) -> HOM(M', X') induced by alpha: M' -> M and phi: X -> X'.

    f goes to (-1)^{|alpha|(|phi|+|f|)} phi o f o alpha.
    """
    degree = alpha.degree + phi.degree
    images = {}
    for g in range(len(source.order)):
        f = source.basis_map(g)
        value = target.element(hom_bifunctor_action(alpha, phi, f))
        if value:
            images[g] = value
    return DgMorphism(source.module, target.module, degree, images, name=f'HOM({alpha.name},{phi.name})')


def precompose(space, alpha):
    """alpha^*: f -> (-1)^{|alpha||f|} f o alpha on a Hom bimodule over alpha's target."""
    phi = space.hom.target.identity()
    return hom_on_morphisms(alpha, phi, space, space)


def postcompose(space, phi):
    """phi_*: f -> phi o f."""
    return hom_on_morphisms(space.hom.source.identity(), phi, space, space)


def tensor_unit_iso(x):
    """B (x)_B X -> X, b (x) x -> bx; returns the map and whether it is an isomorphism."""
    b = regular_bimodule(x.left_algebra)
    t = TensorOverB(b, x)
    one = x.field.one
    images = {}
    for n in sorted(t.representatives):
        for r, (i, j) in enumerate(t.representatives[n]):
            value = x.act_left({i: one}, {j: one})
            if value:
                images[t._module_index[(n, r)]] = value
    mu = DgMorphism(t.module, x, 0, images, name='mu')
    return mu, is_isomorphism(mu)


def tensor_right_unit_iso(u):
    """U (x)_B B -> U, u (x) b -> ub; returns the map and whether it is an isomorphism."""
    b = regular_bimodule(u.right_algebra)
    t = TensorOverB(u, b)
    one = u.field.one
    images = {}
    for n in sorted(t.representatives):
        for r, (i, j) in enumerate(t.representatives[n]):
            value = u.act_right({i: one}, {j: one})
            if value:
                images[t._module_index[(n, r)]] = value
    mu = DgMorphism(t.module, u, 0, images, name='mu')
    return mu, is_isomorphism(mu)


@dataclass
class ShiftCompatibility:
    hom_map: DgMorphism
    tensor_map: DgMorphism
    hom: bool
    tensor: bool


def _is_bimodule_iso(f):
    return is_isomorphism(f) and not check_morphism(f)


def shift_compatibility_check(m, x, k=1):
    """HOM(M[k], X) -> HOM(M, X)[-k], f -> (-1)^{k|f|} f, and M[k] (x) X -> (M (x) X)[k], m (x) x -> m (x) x.

    m is a C-A bimodule for the Hom side; for the tensor side m is paired with
    the regular bimodule of its right algebra.
    """
    shifted_space = overline_hom(shift(m, k), x)
    plain_space = overline_hom(m, x)
    plain = shift(plain_space.module, -k)
    images = {}
    for g in range(shifted_space.module.dim):
        f = shifted_space.basis_map(g)
        same = DgMorphism(plain_space.hom.source, plain_space.hom.target, f.degree - k, f.images, name=f.name)
        value = lc_sign(plain_space.element(same), k * f.degree)
        if value:
            images[g] = value
    hom_map = DgMorphism(shifted_space.module, plain, 0, images, name='theta')
    one = m.field.one
    regular = regular_bimodule(m.right_algebra)
    t_shifted = TensorOverB(shift(m, k), regular)
    t_plain = TensorOverB(m, regular)
    images = {}
    for n in sorted(t_shifted.representatives):
        for r, (i, j) in enumerate(t_shifted.representatives[n]):
            value = t_plain.element({i: one}, {j: one})
            if value:
                images[t_shifted._module_index[(n, r)]] = value
    tensor_map = DgMorphism(t_shifted.module, shift(t_plain.module, k), 0, images, name='tau')
    return ShiftCompatibility(hom_map, tensor_map, _is_bimodule_iso(hom_map), _is_bimodule_iso(tensor_map))


def tensor_modules(u, x):
    """U (x)_B X for one-sided or two-sided inputs; trivial sides are dropped again."""
    result = TensorOverB(as_bimodule(u), as_bimodule(x))
    module = result.module
    if u.side == 'right' and x.side != 'left':
        module = drop_side(module, 'left')
    elif x.side == 'left' and u.side != 'right':
        module = drop_side(module, 'right')
    return result, module
