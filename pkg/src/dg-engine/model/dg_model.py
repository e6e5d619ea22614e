import os

from dg_adjunctions import eta, lambda_iso, xi
from dg_algebra import AlgebraHom, check_homomorphism
from dg_textformat import load_workspace


class Dg:
    _fixture_dir = os.path.join(os.path.dirname(__file__), 'fixtures')
    fixture_names = ['A0', 'A2', 'Lambda', 'D']
    adjunction_dict = {'eta': eta, 'xi': xi, 'lambda': lambda_iso}

    @classmethod
    def resolve_path(cls, name=None, path=None):
        assert name or path

        if path is None:
            if name not in cls.fixture_names:
                raise ValueError(f'{name} not supported. Only {", ".join(cls.fixture_names)} are fixtures.')
            path = os.path.join(cls._fixture_dir, f'{name}.dg')
        return path

    @classmethod
    def load(cls, name=None, path=None):
        return load_workspace(cls.resolve_path(name=name, path=path))

    @classmethod
    def get_algebra(cls, name):
        return cls.load(name=name).algebra(name)

    @classmethod
    def fixtures(cls):
        return {name: cls.get_algebra(name) for name in cls.fixture_names}

    @classmethod
    def resolve_adjunction(cls, name):
        if name not in cls.adjunction_dict:
            raise ValueError(f'{name} not supported. Only eta, xi and lambda are supported.')
        return cls.adjunction_dict[name]

    @classmethod
    def homomorphisms(cls):
        """Identities of the fixtures, plus the unit maps of A0 into Lambda, A2 and D."""
        algebras = cls.fixtures()
        result = [AlgebraHom.identity(a) for a in algebras.values()]
        ground = algebras['A0']
        for name in ('Lambda', 'A2', 'D'):
            target = algebras[name]
            iota = AlgebraHom(ground, target, {0: target.unit()}, name=f'A0->{name}')
            assert not check_homomorphism(iota), f'{iota.name} is not a unitary homomorphism'
            result.append(iota)
        return result
