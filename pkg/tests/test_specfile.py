from fractions import Fraction

import pytest

from triq.algebra import QQ, PrimeField
from triq.exceptions import BadField, DuplicateIndex, NonPrimeModulus, ParseError
from triq.specfile import generate, parse_spec, parse_text, serialize
from triq.variety import AxisPair, ProjectivePoint2, TriPoint, eval_L, partial_Q

HEADER = "field Q\nB 1 1 1 1 1 1 : 1\n"


def test_single_monomial_line():
    spec = parse_text(HEADER + "A 0 0 0 : 1\n")
    assert spec.field is QQ
    assert dict(spec.A.entries()) == {(0, 0, 0): 1}
    e0, e1 = ProjectivePoint2(QQ, (1, 0, 0)), ProjectivePoint2(QQ, (0, 1, 0))
    assert eval_L(spec.A, TriPoint(e0, e0, e0)) == 1
    assert eval_L(spec.A, TriPoint(e1, e0, e0)) == 0


def test_cross_term_is_symmetrized():
    spec = parse_text("field Q\nA 0 0 0 : 1\nB 0 0 0 0 0 1 : 1\n")
    assert spec.B.array[0, 0, 0, 0, 0, 1] == Fraction(1, 2)
    assert spec.B.array[0, 0, 1, 0, 0, 0] == Fraction(1, 2)
    e0 = ProjectivePoint2(QQ, (1, 0, 0))
    assert partial_Q(spec.B, AxisPair.XY, e0, e0, 0, 1) == 1


def test_split_cross_term_equals_single():
    one = parse_text("field Fp 7\nA 0 0 0 : 1\nB 0 0 0 0 0 1 : 4\n")
    two = parse_text("field Fp 7\nA 0 0 0 : 1\nB 0 0 0 0 0 1 : 1\nB 0 0 1 0 0 0 : 3\n")
    assert one.B == two.B


def test_values_and_comments():
    spec = parse_text(
        "# header\nfield Fp:101   # prime\nname  demo run\nseed 42\nmeta source hand\n"
        "A 0 1 2 : -3/4\nB 2 2 2 2 2 2 : 5\n"
    )
    f = PrimeField(101)
    assert spec.field == f
    assert spec.name == "demo run" and spec.seed == 42
    assert spec.metadata == {"source": "hand"}
    assert dict(spec.A.entries())[(0, 1, 2)] == f.coerce(Fraction(-3, 4))


@pytest.mark.parametrize(
    "text,exc,line,column",
    [
        (HEADER + "A 0 0 3 : 1\n", ParseError, 3, 7),
        (HEADER + "A 0 0 : 1\n", ParseError, 3, 1),
        (HEADER + "A 0 0 0 1\n", ParseError, 3, 1),
        (HEADER + "A 0 0 0 : 1\nA 0 0 0 : 2\n", DuplicateIndex, 4, 1),
        (HEADER + "A 0 0 0 : x\n", ParseError, 3, 11),
        (HEADER + "A 0 0 0 : 1/0\n", ParseError, 3, 11),
        (HEADER + "  C 0 : 1\n", ParseError, 3, 3),
        ("field Fp 91\nA 0 0 0 : 1\n", NonPrimeModulus, 1, 7),
        ("field R\nA 0 0 0 : 1\n", BadField, 1, 7),
        (HEADER + "field Q\nA 0 0 0 : 1\n", ParseError, 3, 1),
    ],
)
def test_parse_errors(text, exc, line, column):
    with pytest.raises(exc) as info:
        parse_text(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}" in str(info.value)


def test_missing_field_and_zero_tensors():
    with pytest.raises(BadField):
        parse_text("A 0 0 0 : 1\nB 0 0 0 0 0 0 : 1\n")
    with pytest.raises(ParseError):
        parse_text("field Q\nA 0 0 0 : 1\n")
    with pytest.raises(ParseError):
        parse_text("field Fp 5\nA 0 0 0 : 5\nB 0 0 0 0 0 0 : 1\n")


def test_nonprime_is_bad_field():
    assert issubclass(NonPrimeModulus, BadField)
    assert issubclass(DuplicateIndex, ParseError)


@pytest.mark.parametrize("field", [QQ, PrimeField(101), PrimeField(5)], ids=str)
@pytest.mark.parametrize("kind", ["random", "product"])
def test_round_trip(tmp_path, field, kind):
    spec = generate(11, field, sparsity=0.3, kind=kind)
    text = serialize(spec)
    path = tmp_path / "v.triq"
    path.write_text(text)
    back = parse_spec(path)
    assert back.A == spec.A and back.B == spec.B
    assert (back.name, back.seed, back.metadata) == (spec.name, spec.seed, spec.metadata)
    assert serialize(back) == text


def test_generate_is_deterministic():
    assert serialize(generate(5)) == serialize(generate(5))
    assert serialize(generate(5)) != serialize(generate(6))


def test_generate_sparsity():
    spec = generate(3, PrimeField(101), sparsity=0.1)
    nonzero = sum(1 for _ in spec.B.entries())
    assert 0 < nonzero < 729 // 3
    with pytest.raises(ValueError):
        generate(3, sparsity=0)
    with pytest.raises(ValueError):
        generate(3, kind="cubic")


def test_reduce_modulo_p():
    spec = parse_text("field Q\nA 0 0 0 : 1/2\nB 0 0 0 0 0 0 : -1\n")
    red = spec.reduced(PrimeField(7))
    assert dict(red.A.entries()) == {(0, 0, 0): 4}
    assert dict(red.B.entries()) == {(0,) * 6: 6}
