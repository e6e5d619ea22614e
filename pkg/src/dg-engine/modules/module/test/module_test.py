import random

import pytest

from dg_adjunctions import random_morphism
from dg_errors import NotAChainMapError, SideMismatchError
from dg_model import Dg
from dg_module import (DgModule, DgMorphism, bimodule_to_right, compose_morphisms, cone, hom_complex,
                       homology_dims, homology_map, homology_module, homotopy_category_hom, is_acyclic,
                       is_contractible, is_homology_iso, is_quasi_iso, left_representable, left_to_right,
                       morphism_differential, regular_bimodule, regular_left, regular_right, representable,
                       right_to_bimodule, right_to_left, ses_to_triangle_check, shift, shift_morphism, validate_module)
from dg_random import random_algebras, random_chain_map

FIXTURES = Dg.fixtures()
SEVERAL_IDEMPOTENTS = [a for a in random_algebras(count=12, seed=7) if len(a.idempotents) > 1][:3]
ALGEBRAS = list(FIXTURES.values()) + SEVERAL_IDEMPOTENTS


def fixture_modules():
    modules = []
    for a in FIXTURES.values():
        modules.append(regular_right(a))
        modules += [representable(a, i) for i in range(len(a.idempotents))]
    return modules


@pytest.mark.parametrize('m', fixture_modules(), ids=lambda m: m.name)
def test_fixture_modules_valid(m):
    assert validate_module(m) == []
    assert validate_module(shift(m, 1)) == []
    assert validate_module(shift(m, -2)) == []


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_left_and_bimodules_valid(name):
    a = FIXTURES[name]
    assert validate_module(regular_left(a)) == []
    assert validate_module(regular_bimodule(a)) == []
    assert validate_module(left_to_right(regular_left(a))) == []
    assert validate_module(bimodule_to_right(regular_bimodule(a))) == []


def test_representable_dims():
    a2 = FIXTURES['A2']
    assert representable(a2, 0).dim == 2
    assert representable(a2, 1).dim == 1
    assert left_representable(a2, 1).dim == 2
    assert hom_complex(representable(a2, 1), representable(a2, 0)).dims() == {0: 1}
    assert hom_complex(representable(a2, 0), representable(a2, 1)).dims() == {}


def test_corrupted_module():
    d = FIXTURES['D']
    m = regular_right(d)
    a = m.index('a')
    act = dict(m.act)
    act[(a, d.index('a'))] = {a: d.field.one}
    laws = {v.law for v in validate_module(DgModule(m.basis, d, act=act, diff=m.diff, name='bad'))}
    assert 'leibniz' in laws
    assert 'associativity' in laws

    e = m.index('e')
    diff = dict(m.diff)
    diff[e] = {e: d.field.one}
    laws = {v.law for v in validate_module(DgModule(m.basis, d, act=m.act, diff=diff, name='bad'))}
    assert 'differential-degree' in laws


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_side_round_trips(name):
    a = FIXTURES[name]
    left = regular_left(a)
    assert right_to_left(left_to_right(left), a).tables_equal(left)
    bimodule = regular_bimodule(a)
    assert right_to_bimodule(bimodule_to_right(bimodule), a, a).tables_equal(bimodule)


def test_shift():
    m = regular_right(FIXTURES['D'])
    assert homology_dims(m) == {0: 1, 1: 0}
    assert homology_dims(shift(m, 1)) == {-1: 1, 0: 0}
    assert shift(shift(m, 1), -1).tables_equal(m)


def test_hom_requires_same_side():
    a = FIXTURES['Lambda']
    with pytest.raises(SideMismatchError):
        hom_complex(regular_right(a), regular_left(a))


def test_hom_complex_of_d():
    m = regular_right(FIXTURES['D'])
    hom = hom_complex(m, m)
    assert hom.dims() == {0: 2, 1: 1}
    assert hom.homology() == {0: 1, 1: 0}
    assert homotopy_category_hom(m, m) == 1


def composable_triples():
    triples = []
    for a in ALGEBRAS:
        m = regular_right(a)
        triples.append((m, m, m))
        triples.append((representable(a, 0), m, shift(m, 1)))
    d = regular_right(FIXTURES['D'])
    c = cone(d.identity()).module
    triples.append((d, c, c))
    return triples


@pytest.mark.parametrize('m, n, p', composable_triples())
def test_hom_differential_laws(m, n, p):
    hom_mn, hom_np = hom_complex(m, n), hom_complex(n, p)
    for seed in range(100):
        rng = random.Random(seed)
        f = random_morphism(hom_mn, rng)
        g = random_morphism(hom_np, rng)
        assert morphism_differential(morphism_differential(f)).is_zero()
        lhs = morphism_differential(compose_morphisms(g, f))
        dg_f = compose_morphisms(morphism_differential(g), f)
        g_df = compose_morphisms(g, morphism_differential(f))
        rhs = dg_f + (g_df if g.degree % 2 == 0 else -g_df)
        assert lhs == rhs, seed


@pytest.mark.parametrize('m', fixture_modules(), ids=lambda m: m.name)
def test_cone_of_identity_contractible(m):
    c = cone(m.identity()).module
    assert validate_module(c) == []
    contractible, sigma = is_contractible(c)
    assert contractible
    assert sigma.degree == -1
    assert is_acyclic(c)


def test_ground_module_not_contractible():
    contractible, sigma = is_contractible(regular_right(FIXTURES['A0']))
    assert not contractible
    assert sigma is None


def test_cone_rejects_non_chain_map():
    m = regular_right(FIXTURES['D'])
    f = DgMorphism(m, m, 0, {m.index('e'): {m.index('a'): m.field.one}})
    with pytest.raises(NotAChainMapError):
        cone(f)


def test_homology_action():
    h = homology_module(regular_right(FIXTURES['Lambda']), with_action=True)
    assert h.dims == {0: 1, 1: 1}
    assert h.action[((0, 0), (1, 0))] == {(1, 0): 1}


def test_homology_map():
    m = regular_right(FIXTURES['D'])
    f = m.identity().scale(2)
    assert homology_map(f, 0) == [[2]]
    assert is_homology_iso(f)


def quasi_iso_pairs():
    pairs = []
    for a in ALGEBRAS:
        m = regular_right(a)
        pairs.append((m, m))
        pairs += [(representable(a, i), m) for i in range(len(a.idempotents))]
    d = regular_right(FIXTURES['D'])
    pairs.append((d, cone(d.identity()).module))
    return pairs


@pytest.mark.parametrize('m, n', quasi_iso_pairs())
def test_quasi_iso_agrees_with_homology(m, n):
    hom = hom_complex(m, n)
    for seed in range(50):
        f = random_chain_map(hom, random.Random(seed))
        assert is_quasi_iso(f) == is_homology_iso(f), seed


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_cone_conflation_splits(name):
    m = regular_right(FIXTURES[name])
    f = m.identity().scale(3)
    tw = cone(f)
    report = ses_to_triangle_check(tw.inclusion, tw.projection)
    assert report.ok
    assert report.twist.images == f.images


def test_non_conflation():
    m = regular_right(FIXTURES['D'])
    report = ses_to_triangle_check(m.identity(), m.identity())
    assert not report.conflation
    assert not report.ok


@pytest.mark.parametrize('k', [1, -1, 2])
@pytest.mark.parametrize('m, n, p', composable_triples())
def test_shift_negates_differential(m, n, p, k):
    hom = hom_complex(m, n)
    rng = random.Random(k)
    for _ in range(10):
        f = random_morphism(hom, rng)
        shifted = morphism_differential(shift_morphism(f, k))
        expected = shift_morphism(morphism_differential(f), k)
        assert shifted == (-expected if k % 2 else expected)


@pytest.mark.parametrize('a', ALGEBRAS, ids=lambda a: a.name)
def test_left_to_right_keeps_homology_and_homotopies(a):
    for u in [regular_left(a)] + [left_representable(a, i) for i in range(len(a.idempotents))]:
        r = left_to_right(u)
        assert validate_module(r) == []
        assert homology_dims(r) == homology_dims(u)
        assert hom_complex(r, r).dims() == hom_complex(u, u).dims()
        c = cone(u.identity()).module
        contractible, sigma = is_contractible(c)
        assert contractible
        cr = left_to_right(c)
        moved = DgMorphism(cr, cr, -1, sigma.images, name='sigma')
        assert morphism_differential(moved) == cr.identity()
        assert is_contractible(cr)[0]
