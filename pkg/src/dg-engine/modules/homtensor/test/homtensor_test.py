import random

import pytest

from dg_adjunctions import random_morphism
from dg_errors import SideMismatchError
from dg_homtensor import (TensorOverB, hom_on_morphisms, overline_hom, overline_hom_left, postcompose, precompose,
                          shift_compatibility_check, tensor_modules, tensor_on_morphisms, tensor_over,
                          tensor_right_unit_iso, tensor_unit_iso)
from dg_linalg import lc_sign
from dg_model import Dg
from dg_module import (DgMorphism, as_bimodule, check_morphism, compose_morphisms, hom_complex, homology_dims,
                       is_isomorphism, left_representable, regular_bimodule, regular_left, regular_right, representable,
                       shift, validate_module)
from dg_random import truncated_path_algebra

FIXTURES = Dg.fixtures()
PATH_ALGEBRAS = [truncated_path_algebra([0], 1, name='P2'), truncated_path_algebra([1], 1, name='P2odd'),
                 truncated_path_algebra([0, 1], 2, name='P3')]
ALGEBRAS = list(FIXTURES.values()) + PATH_ALGEBRAS


def dims(m):
    return {n: m.space.dim(n) for n in m.space.degrees}


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_tensor_unit(name):
    a = FIXTURES[name]
    mu, iso = tensor_unit_iso(regular_bimodule(a))
    assert iso
    assert validate_module(mu.source) == []
    _, iso = tensor_unit_iso(as_bimodule(regular_left(a)))
    assert iso


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_regular_hom_and_tensor(name):
    a = FIXTURES[name]
    b = regular_bimodule(a)
    hom = overline_hom(b, b).module
    assert validate_module(hom) == []
    assert dims(hom) == dims(b)
    assert homology_dims(hom) == homology_dims(b)

    hom_left = overline_hom_left(b, b).module
    assert validate_module(hom_left) == []
    assert dims(hom_left) == dims(b)

    tensor = tensor_over(b, b).module
    assert validate_module(tensor) == []
    assert dims(tensor) == dims(b)


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_one_sided_tensor(name):
    a = FIXTURES[name]
    _, module = tensor_modules(regular_right(a), regular_bimodule(a))
    assert module.side == 'right'
    assert dims(module) == dims(regular_right(a))
    assert validate_module(module) == []


def test_overline_hom_needs_bimodules():
    a = FIXTURES['D']
    with pytest.raises(SideMismatchError):
        overline_hom(regular_right(a), regular_right(a))


@pytest.mark.parametrize('name', Dg.fixture_names)
@pytest.mark.parametrize('k', [-1, 1, 2])
def test_shift_compatibility(name, k):
    b = regular_bimodule(FIXTURES[name])
    result = shift_compatibility_check(b, b, k)
    assert result.hom
    assert result.tensor
    assert result.hom_map.degree == 0


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_functoriality_on_identities(name):
    a = FIXTURES[name]
    b = regular_bimodule(a)
    assert is_isomorphism(tensor_on_morphisms(b.identity(), b.identity()))
    space = overline_hom(b, b)
    assert is_isomorphism(precompose(space, b.identity()))
    assert is_isomorphism(postcompose(space, b.identity()))


def test_representable_hom_is_column():
    a2 = FIXTURES['A2']
    m = as_bimodule(representable(a2, 1))
    x = as_bimodule(regular_right(a2))
    # HOM(e2A, A) is A e2
    assert dims(overline_hom(m, x).module) == {0: 2}


def sign(odd):
    return -1 if odd % 2 else 1


@pytest.mark.parametrize('a', ALGEBRAS, ids=lambda a: a.name)
def test_regular_hom_is_the_algebra(a):
    b = regular_bimodule(a)
    one = a.field.one
    right, left = overline_hom(b, b), overline_hom_left(b, b)
    assert validate_module(right.module) == []
    assert validate_module(left.module) == []
    by_left, by_right = {}, {}
    for i in range(a.dim):
        # a -> (m -> am) and a -> (m -> (-1)^{|a||m|} ma)
        lmul = DgMorphism(b, b, a.degree(i), {j: b.act_left({i: one}, {j: one}) for j in range(b.dim)})
        rmul = DgMorphism(b, b, a.degree(i), {j: lc_sign(b.act_right({j: one}, {i: one}), a.degree(i) * b.degree(j))
                                              for j in range(b.dim)})
        by_left[i] = right.element(lmul)
        by_right[i] = left.element(rmul)
    for space, images in ((right, by_left), (left, by_right)):
        phi = DgMorphism(b, space.module, 0, images)
        assert check_morphism(phi) == []
        assert is_isomorphism(phi)


@pytest.mark.parametrize('degree', [0, 1])
def test_tensor_over_path_algebra(degree):
    p = truncated_path_algebra([degree], 1)
    regular = regular_bimodule(p)
    _, iso = tensor_unit_iso(regular)
    assert iso
    for x in [regular, as_bimodule(representable(p, 0)), as_bimodule(representable(p, 1)),
              as_bimodule(shift(representable(p, 0), 1))]:
        t = tensor_over(x, regular)
        assert validate_module(t.module) == []
        assert dims(t.module) == dims(x)
        _, iso = tensor_right_unit_iso(x)
        assert iso


@pytest.mark.parametrize('i, j', [(0, 0), (0, 1), (1, 1)])
@pytest.mark.parametrize('degree', [0, 1])
def test_representable_tensor_is_corner(degree, i, j):
    # e_iA (x)_A Ae_j is e_iAe_j
    p = truncated_path_algebra([degree], 1)
    t = tensor_over(as_bimodule(representable(p, i)), as_bimodule(left_representable(p, j)))
    assert validate_module(t.module) == []
    expected = {}
    for element in p.basis:
        if (element.left, element.right) == (i, j):
            expected[element.degree] = expected.get(element.degree, 0) + 1
    assert {n: d for n, d in dims(t.module).items() if d} == expected


@pytest.mark.parametrize('seed', range(4))
@pytest.mark.parametrize('name', Dg.fixture_names)
def test_hom_interchange(name, seed):
    b = regular_bimodule(FIXTURES[name])
    space = overline_hom(b, b)
    end = hom_complex(b, b)
    rng = random.Random(seed)
    alpha, beta, phi = random_morphism(end, rng), random_morphism(end, rng), random_morphism(end, rng)
    one = b.identity()
    pre = hom_on_morphisms(alpha, one, space, space)
    post = hom_on_morphisms(one, phi, space, space)
    both = hom_on_morphisms(alpha, phi, space, space)
    assert compose_morphisms(pre, post) == both
    assert compose_morphisms(post, pre) == both.scale(sign(alpha.degree * phi.degree))
    # contravariant in the first slot
    chained = compose_morphisms(hom_on_morphisms(beta, one, space, space), pre)
    assert chained == hom_on_morphisms(compose_morphisms(alpha, beta), one, space, space).scale(
        sign(alpha.degree * beta.degree))


@pytest.mark.parametrize('seed', range(4))
@pytest.mark.parametrize('name', Dg.fixture_names)
def test_tensor_interchange(name, seed):
    b = regular_bimodule(FIXTURES[name])
    t = TensorOverB(b, b)
    end = hom_complex(b, b)
    rng = random.Random(seed)
    alpha, phi = random_morphism(end, rng), random_morphism(end, rng)
    one = b.identity()
    first = tensor_on_morphisms(alpha, one, t, t)
    second = tensor_on_morphisms(one, phi, t, t)
    both = tensor_on_morphisms(alpha, phi, t, t)
    assert compose_morphisms(first, second) == both
    assert compose_morphisms(second, first) == both.scale(sign(alpha.degree * phi.degree))


def test_tensor_sign_on_odd_elements():
    lam = FIXTURES['Lambda']
    one = lam.field.one
    u = as_bimodule(shift(regular_right(lam), 1))
    x = regular_bimodule(lam)
    phi = DgMorphism(x, x, 1, {x.index('e'): {x.index('x'): one}}, name='phi')
    assert check_morphism(phi) == []
    t = TensorOverB(u, x)
    mapped = tensor_on_morphisms(u.identity(), phi, t, t)
    # |phi| = 1 and |e| = -1 in U, so e (x) e goes to -(e (x) x) = -(x (x) e)
    image = mapped.apply(t.element({u.index('e'): one}, {x.index('e'): one}))
    expected = t.element({u.index('x'): one}, {x.index('e'): one})
    assert expected
    assert image == lc_sign(expected, 1)
