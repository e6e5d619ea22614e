import pytest

from dg_adjunctions import eta, extend_scalars, extension_restriction_certificate, lambda_iso, restrict_scalars, xi
from dg_config import engine_config
from dg_model import Dg
from dg_module import as_bimodule, regular_bimodule, regular_left, regular_right, representable, validate_module
from dg_random import random_algebras

FIXTURES = Dg.fixtures()
HOMOMORPHISMS = Dg.homomorphisms()
SEVERAL_IDEMPOTENTS = [a for a in random_algebras(count=12, seed=7) if len(a.idempotents) > 1][:3]
ALGEBRAS = list(FIXTURES.values()) + SEVERAL_IDEMPOTENTS


@pytest.mark.parametrize('a', ALGEBRAS, ids=lambda a: a.name)
def test_eta(a):
    u = as_bimodule(regular_right(a))
    x = regular_bimodule(a)
    m = as_bimodule(regular_right(a))
    certificate = eta(u, x, m, seed=1)
    assert certificate.valid, certificate.witness
    assert certificate.lhs_dims == certificate.rhs_dims


@pytest.mark.parametrize('a', ALGEBRAS, ids=lambda a: a.name)
def test_eta_on_representables(a):
    for i in range(len(a.idempotents)):
        certificate = eta(as_bimodule(representable(a, i)), regular_bimodule(a), as_bimodule(regular_right(a)),
                          seed=2)
        assert certificate.valid, certificate.witness


@pytest.mark.parametrize('a', ALGEBRAS, ids=lambda a: a.name)
def test_xi(a):
    u = as_bimodule(regular_left(a))
    m = as_bimodule(regular_right(a))
    x = regular_bimodule(a)
    certificate = xi(u, m, x, seed=3)
    assert certificate.inverse_ok
    assert certificate.valid, certificate.witness
    assert certificate.to_dict()['valid']


@pytest.mark.parametrize('iota', HOMOMORPHISMS, ids=lambda iota: iota.name)
def test_lambda(iota):
    m = regular_right(iota.target)
    certificate = lambda_iso(iota, m)
    assert certificate.mutual_inverse
    assert certificate.chain_map
    assert certificate.valid
    assert validate_module(restrict_scalars(iota, as_bimodule(m))) == []


@pytest.mark.parametrize('iota', HOMOMORPHISMS, ids=lambda iota: iota.name)
def test_extension_restriction(iota):
    u = regular_right(iota.source)
    m = regular_right(iota.target)
    certificate = extension_restriction_certificate(iota, u, m, seed=0)
    assert certificate.valid, certificate.witness


@pytest.mark.parametrize('iota', HOMOMORPHISMS, ids=lambda iota: iota.name)
def test_extend_regular(iota):
    extended = extend_scalars(iota, regular_right(iota.source))
    assert validate_module(extended) == []
    assert extended.dim == iota.target.dim


def test_default_panel():
    a = FIXTURES['D']
    certificate = eta(as_bimodule(regular_right(a)), regular_bimodule(a), as_bimodule(regular_right(a)), seed=4)
    assert certificate.panel_size == engine_config().naturality_panel
    assert certificate.panel_size >= 16
