import ast
import json
import os

import pytest

from dg_cli import main
from dg_errors import LanguageError
from dg_model import Dg
from dg_textformat import (algebra_section, build_objects, load_document, parse_document, print_document,
                           print_section)

D_DOCUMENT = """\
[algebra D]
field = Q
idempotents = e
basis e : 0 : e : e
basis a : 0 : e : e
basis b : 1 : e : e
diff a = b

[module M]
side = right
algebra = D
basis m : 0 : - : e
basis n : 0 : - : e
basis o : 1 : - : e
act m.a = n
act m.b = o
diff n = o

[morphism f]
source = M
target = M
map m = m
map n = n
map o = o

[morphism g]
source = M
target = M
map m = n
"""


@pytest.fixture
def d_file(tmp_path):
    path = tmp_path / 'd.dg'
    path.write_text(D_DOCUMENT)
    return str(path)


def write(tmp_path, text, name='doc.dg'):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.mark.parametrize('name', Dg.fixture_names)
def test_fixture_round_trip(name):
    path = Dg.resolve_path(name)
    with open(path) as file:
        text = file.read()
    assert print_document(load_document(path)) == text
    assert print_section(algebra_section(Dg.get_algebra(name))) == text


def test_unknown_fixture():
    with pytest.raises(ValueError):
        Dg.resolve_path('B')


def test_lincomb_printing():
    doc = parse_document('[morphism h]\nmap x = -x + 1/2*y - 2*z\nmap y = 0\n')
    assert print_document(doc) == '[morphism h]\nmap x = -x + 1/2*y - 2*z\nmap y = 0\n'


def test_bare_coefficient_rejected():
    with pytest.raises(LanguageError) as error:
        parse_document('[morphism h]\nmap x = 3\n')
    assert error.value.line == 2


def test_validate(d_file, capsys):
    assert main(['validate', d_file]) == 0
    assert capsys.readouterr().out.strip() == 'valid'


def test_validate_fixture(capsys):
    assert main(['validate', Dg.resolve_path('D')]) == 0
    assert capsys.readouterr().out.strip() == 'valid'


def test_duplicate_label(tmp_path, capsys):
    path = write(tmp_path, '[algebra A]\nidempotents = e\nbasis e : 0 : e : e\nbasis e : 1 : e : e\n')
    assert main(['validate', path]) == 2
    err = capsys.readouterr().err
    assert 'Line 4' in err
    assert 'duplicate basis label e (lines 3 and 4)' in err


def test_unknown_idempotent(tmp_path, capsys):
    path = write(tmp_path, '[algebra A]\nidempotents = e\nbasis e : 0 : e : e\nbasis x : 0 : e : f\n')
    assert main(['validate', path]) == 2
    assert 'unknown idempotent f' in capsys.readouterr().err


def test_syntax_error(tmp_path, capsys):
    path = write(tmp_path, '[algebra A]\nidempotents = e\nbasis e 0 e e\n')
    assert main(['validate', path]) == 2
    assert 'Line 3' in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(['validate', str(tmp_path / 'none.dg')]) == 2


def test_invalid_algebra(tmp_path, capsys):
    path = write(tmp_path, '[algebra A]\nidempotents = e\nbasis e : 0 : e : e\nbasis x : 1 : e : e\n'
                           'mul x.x = 0\ndiff x = 0\nbasis y : 1 : e : e\nmul x.y = x\n')
    assert main(['validate', path]) == 2
    capsys.readouterr()
    path = write(tmp_path, '[algebra A]\nidempotents = e\nbasis e : 0 : e : e\nbasis a : 0 : e : e\n'
                           'basis b : 1 : e : e\ndiff a = b\nmul a.a = a\n', name='bad.dg')
    assert main(['validate', path]) == 1
    assert 'leibniz' in capsys.readouterr().out


def test_homology(capsys):
    assert main(['homology', Dg.resolve_path('D'), '--module', 'regular']) == 0
    assert capsys.readouterr().out == 'H^0 1\nH^1 0\n'
    assert main(['homology', Dg.resolve_path('Lambda')]) == 0
    assert capsys.readouterr().out == 'H^0 1\nH^1 1\n'


def test_homology_action(capsys):
    assert main(['homology', Dg.resolve_path('Lambda'), '--module', 'regular', '--action']) == 0
    assert '[0:0].[1:0] = 1*[1:0]' in capsys.readouterr().out


def test_hom(d_file, capsys):
    assert main(['hom', d_file, 'M', 'M']) == 0
    assert capsys.readouterr().out == 'HOM^0 2 H^0 1\nHOM^1 1 H^1 0\n'


def test_cone(d_file, capsys):
    assert main(['cone', d_file, 'f']) == 0
    assert capsys.readouterr().out.rstrip().endswith('acyclic: yes')


def test_cone_of_non_chain_map(d_file, capsys):
    assert main(['cone', d_file, 'g']) == 1
    assert '[rejected]' in capsys.readouterr().err


def test_tensor(capsys):
    assert main(['tensor', Dg.resolve_path('A2'), 'regular', 'bimodule']) == 0
    out = capsys.readouterr().out
    assert out.startswith('[module ')
    assert 'side = right' in out


def test_duality_check(capsys):
    assert main(['duality-check', Dg.resolve_path('A2'), '--semifree', 'leaf 1 0']) == 0
    assert capsys.readouterr().out.splitlines()[0] == 'reflexive: yes'


def test_duality_check_tree(capsys):
    assert main(['duality-check', Dg.resolve_path('D'), '--semifree', 'leaf e 0; leaf e 1']) == 0
    assert capsys.readouterr().out.splitlines()[0] == 'reflexive: yes'


def test_dualize(capsys):
    assert main(['dualize', Dg.resolve_path('A2'), '--module', 'rep:e2']) == 0
    assert 'side = left' in capsys.readouterr().out


def test_machine_format(capsys):
    assert main(['--format', 'machine', 'duality-check', Dg.resolve_path('A2'), '--semifree', 'leaf 1 0']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['ok'] is True
    assert report['verb'] == 'duality-check'
    assert report['reflexive'] is True


@pytest.mark.parametrize('kind', ['eta', 'xi'])
def test_adjunction_check(kind, capsys):
    path = Dg.resolve_path('D')
    objects = ['regular', 'bimodule', 'regular'] if kind == 'eta' else ['left-regular', 'regular', 'bimodule']
    assert main(['--seed', '5', 'adjunction-check', kind, path] + objects) == 0
    assert capsys.readouterr().out.splitlines()[0] == 'valid: yes'


def test_adjunction_check_arity(capsys):
    assert main(['adjunction-check', 'eta', Dg.resolve_path('D'), 'regular']) == 2


def test_lambda_and_base_change(tmp_path, capsys):
    path = write(tmp_path, '[algebra A0]\nidempotents = e\nbasis e : 0 : e : e\n\n'
                           '[algebra A2]\nidempotents = e1 e2\nbasis e1 : 0 : e1 : e1\nbasis e2 : 0 : e2 : e2\n'
                           'basis alpha : 0 : e1 : e2\n\n'
                           '[homomorphism iota]\nsource = A0\ntarget = A2\nimage e = e1 + e2\n')
    assert main(['adjunction-check', 'lambda', path, 'iota', 'regular']) == 0
    assert capsys.readouterr().out.splitlines()[0] == 'valid: yes'
    assert main(['base-change-check', path, 'iota', '--semifree', 'leaf e 0']) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == 'valid: yes'
    assert 'factorization: yes' in out


def test_semifree_realize(capsys):
    assert main(['semifree-realize', Dg.resolve_path('A0'), '--semifree', 'leaf 1 0']) == 0
    assert capsys.readouterr().out.startswith('node 0: representable eA[0]')


def test_check_sections(tmp_path, capsys):
    write(tmp_path, D_DOCUMENT, name='d.dg')
    path = write(tmp_path, D_DOCUMENT + '\n[check h]\nverb = homology\nargs = d.dg --module M\n', name='checks.dg')
    assert main(['check', path]) == 0
    out = capsys.readouterr().out
    assert out.startswith('[h] ok')
    assert '  H^0 1' in out


def test_bad_config(tmp_path, capsys):
    path = write(tmp_path, 'dg_engine:\n  degree_bound: [3, -3]\n', name='bad.yaml')
    assert main(['--config', path, 'validate', Dg.resolve_path('D')]) == 2


UNNAMED = """\
[algebra]
field = Q
idempotents = e
basis e : 0 : e : e
basis x : 1 : e : e

[module]
side = right
algebra = A
basis m : 0 : - : e
basis n : 1 : - : e
act m.x = n
"""


def test_unnamed_sections(tmp_path, capsys):
    doc = parse_document(UNNAMED)
    assert [(s.kind, s.name, s.named) for s in doc.sections] == [('algebra', 'A', False), ('module', 'M', False)]
    assert print_document(doc) == UNNAMED
    ws = build_objects(doc)
    assert ws.modules['M'].dim == 2
    assert main(['validate', write(tmp_path, UNNAMED)]) == 0
    assert capsys.readouterr().out.strip() == 'valid'


@pytest.mark.parametrize('coefficient, expected', [('1/2', 3), ('-1/3', 3), ('4', 4)])
def test_prime_field_fractions(coefficient, expected):
    text = (f'[algebra A]\nfield = Fp 5\nidempotents = e\nbasis e : 0 : e : e\nbasis a : 0 : e : e\n'
            f'basis b : 1 : e : e\ndiff a = {coefficient}*b\n')
    a = build_objects(parse_document(text)).algebras['A']
    assert a.diff[a.index('a')] == {a.index('b'): a.field.scalar(expected)}


def test_prime_field_zero_denominator(tmp_path, capsys):
    path = write(tmp_path, '[algebra A]\nfield = Fp 5\nidempotents = e\nbasis e : 0 : e : e\nbasis a : 0 : e : e\n'
                           'basis b : 1 : e : e\ndiff a = 1/5*b\n')
    assert main(['validate', path]) == 2
    assert 'Line 7' in capsys.readouterr().err


def blank_lines_before_definitions(source):
    """Blank lines ahead of each top-level def or class that follows another statement, comments excluded."""
    lines = source.splitlines()
    tree = ast.parse(source)
    result = []
    for previous, node in zip(tree.body, tree.body[1:]):
        if not isinstance(node, (ast.FunctionDef, ast.ClassDef)):
            continue
        start = min([node.lineno] + [d.lineno for d in node.decorator_list])
        gap = lines[previous.end_lineno:start - 1]
        blank = 0
        for line in gap:
            if line.strip():
                break
            blank += 1
        result.append((node.name, blank))
    return result


@pytest.mark.parametrize('module', ['dg_cli', 'dg_perfect', 'dg_homtensor', 'dg_textformat', 'dg_linalg'])
def test_definitions_are_separated_by_two_blank_lines(module):
    path = os.path.join(os.path.dirname(Dg.resolve_path('A0')), os.pardir, f'{module}.py')
    with open(path) as file:
        layout = blank_lines_before_definitions(file.read())
    assert layout
    assert [(name, blank) for name, blank in layout if blank != 2] == []
