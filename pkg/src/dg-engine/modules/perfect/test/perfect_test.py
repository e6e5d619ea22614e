import dataclasses
import random

import pytest

from dg_algebra import AlgebraHom
from dg_errors import InvalidStructureError, NotAChainMapError, PreconditionError
from dg_model import Dg
from dg_module import (DgMorphism, cone, hom_complex, is_isomorphism, left_representable, regular_right,
                       representable, shift)
from dg_perfect import (ConeNode, Leaf, SemifreeTree, acyclic_preservation_check, base_change_eta,
                        cone_duality_check, duality_check, enumerate_trees, phi_iso, psi_iso, realize_semifree,
                        unit_factorization, unit_map)
from dg_random import random_algebras, random_chain_map

FIXTURES = Dg.fixtures()
SEVERAL_IDEMPOTENTS = [a for a in random_algebras(count=12, seed=7) if len(a.idempotents) > 1][:3]
ALGEBRAS = list(FIXTURES.values()) + SEVERAL_IDEMPOTENTS
HOMOMORPHISMS = Dg.homomorphisms() + [AlgebraHom.identity(a) for a in SEVERAL_IDEMPOTENTS]


def idempotent_positions():
    return [(a, i) for a in ALGEBRAS for i in range(len(a.idempotents))]


def position_id(value):
    return value.name if hasattr(value, 'name') else str(value)


@pytest.mark.parametrize('a, i', idempotent_positions(), ids=position_id)
def test_representable_duals(a, i):
    assert is_isomorphism(psi_iso(a, i))
    assert is_isomorphism(phi_iso(a, i))


@pytest.mark.parametrize('a, j', idempotent_positions(), ids=position_id)
def test_unit_factorization(a, j):
    unit, _, _ = unit_map(left_representable(a, j))
    assert unit_factorization(a, j) == unit


@pytest.mark.parametrize('k', [-1, 0, 1])
@pytest.mark.parametrize('a, i', idempotent_positions(), ids=position_id)
def test_shifted_representables_reflexive(a, i, k):
    certificate = duality_check(shift(representable(a, i), k))
    assert certificate.reflexive
    assert certificate.isomorphism
    assert duality_check(left_representable(a, i)).reflexive


@pytest.mark.parametrize('a', ALGEBRAS, ids=position_id)
def test_small_trees_reflexive(a):
    shifts = (0, 1) if a.name in FIXTURES else (0,)
    for tree in enumerate_trees(a, max_depth=2, shifts=shifts):
        module = realize_semifree(tree).module
        certificate = duality_check(module)
        assert certificate.reflexive, tree.describe()
        assert certificate.homology == certificate.double_homology


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_depth_three_trees_reflexive(name):
    a = FIXTURES[name]
    trees = [tree for tree in enumerate_trees(a, max_depth=3, shifts=(0,)) if tree.depth() == 3]
    assert trees
    for tree in trees:
        certificate = duality_check(realize_semifree(tree).module)
        assert certificate.reflexive, tree.describe()


def test_tree_shape():
    a0 = FIXTURES['A0']
    tree = SemifreeTree(a0, [Leaf(0, 0), Leaf(0, 1), ConeNode(0, 1)])
    assert tree.depth() == 2
    assert tree.describe() == 'C(eA[0] -> eA[1])'
    realization = realize_semifree(tree)
    assert realization.module.dim == 2
    assert len(realization.certificate) == 3


def test_tree_errors():
    d = FIXTURES['D']
    with pytest.raises(InvalidStructureError):
        realize_semifree(SemifreeTree(d, [Leaf(3, 0)]))
    with pytest.raises(InvalidStructureError):
        realize_semifree(SemifreeTree(d, [Leaf(0, 0), ConeNode(0, 1)]))
    m = representable(d, 0)
    bad = DgMorphism(m, m, 0, {m.index('e'): {m.index('a'): d.field.one}})
    with pytest.raises(NotAChainMapError):
        realize_semifree(SemifreeTree(d, [Leaf(0, 0), Leaf(0, 0), ConeNode(0, 1, bad)]))


@pytest.mark.parametrize('iota', HOMOMORPHISMS, ids=position_id)
def test_base_change_on_representables(iota):
    for i in range(len(iota.source.idempotents)):
        report = base_change_eta(iota, representable(iota.source, i), representable_idempotent=i)
        assert report.chain_map
        assert report.factorization
        assert report.isomorphism
        assert report.valid
        assert report.to_dict()['factorization'] is True


def test_base_change_needs_the_representable():
    iota = Dg.homomorphisms()[-1]
    with pytest.raises(PreconditionError):
        base_change_eta(iota, shift(representable(iota.source, 0), 1), representable_idempotent=0)


@pytest.mark.parametrize('iota', HOMOMORPHISMS, ids=position_id)
def test_base_change_on_trees(iota):
    shifts = (0,) if len(iota.source.idempotents) > 1 else (0, 1)
    for tree in enumerate_trees(iota.source, max_depth=2, shifts=shifts):
        report = base_change_eta(iota, realize_semifree(tree).module)
        assert report.chain_map, tree.describe()
        assert report.quasi_iso, tree.describe()
        assert report.factorization is None


@pytest.mark.parametrize('seed', range(3))
@pytest.mark.parametrize('a', ALGEBRAS, ids=position_id)
def test_cone_duality(a, seed):
    m = regular_right(a)
    report = cone_duality_check(m.identity())
    assert report.valid
    assert report.theta.degree == 0
    rng = random.Random(seed)
    assert cone_duality_check(random_chain_map(hom_complex(m, m), rng)).valid
    n = len(a.idempotents)
    for i, j in [(i, j) for i in range(n) for j in range(n)]:
        f = random_chain_map(hom_complex(representable(a, j), representable(a, i)), rng)
        assert cone_duality_check(f).valid, (i, j)


@pytest.mark.parametrize('a', ALGEBRAS, ids=position_id)
def test_acyclic_preservation(a):
    x = cone(regular_right(a).identity()).module
    for tree in enumerate_trees(a, max_depth=2, shifts=(0,)):
        report = acyclic_preservation_check(realize_semifree(tree), x)
        assert report.acyclic, tree.describe()
        assert report.homology == {}


def test_acyclic_preservation_preconditions():
    d = FIXTURES['D']
    p = realize_semifree(SemifreeTree(d, [Leaf(0, 0)]))
    x = cone(regular_right(d).identity()).module
    with pytest.raises(PreconditionError):
        acyclic_preservation_check(p.module, x)
    with pytest.raises(PreconditionError):
        acyclic_preservation_check(p, regular_right(d))
    with pytest.raises(PreconditionError):
        acyclic_preservation_check(dataclasses.replace(p, module=shift(p.module, 1)), x)
