from fractions import Fraction as F

import pytest

from esc.config import ConfigError, canonical_family, dump_family, fingerprint, load_family, parse_family
from esc.family import FamilyKind, bernoulli_pmf

DYADIC = """\
n: 2
kind: explicit
members:
  - [1/2, 1/4, 1/8, 1/8]
"""


def test_parse_explicit():
    fam = parse_family(DYADIC)
    assert fam.kind is FamilyKind.EXPLICIT
    assert fam.members[0].probs == (F(1, 2), F(1, 4), F(1, 8), F(1, 8))


def test_decimals_are_exact():
    fam = parse_family("n: 1\nmembers:\n  - [0.1, 0.9]\n")
    assert fam.members[0].probs == (F(1, 10), F(9, 10))


def test_thetas():
    fam = parse_family("n: 3\nthetas: [1/4, 0.75]\n")
    assert fam.members == (bernoulli_pmf(3, F(1, 4)), bernoulli_pmf(3, F(3, 4)))


def test_bernoulli_nml():
    fam = parse_family("n: 5\nkind: bernoulli-nml\ngrid: 10\n")
    assert fam.kind is FamilyKind.BERNOULLI_NML and fam.grid == 10


@pytest.mark.parametrize(
    "text, line, field",
    [
        ("n: 2\nmembers:\n  - [1/2, 1/2]\n", 3, "members[0]"),
        ("n: 2\nmembers:\n  - [1/2, 1/4, 1/8, 1/4]\n", 3, "members[0]"),
        ("n: 1\nmembers:\n  - [1/2, x]\n", 3, "members[0][1]"),
        ("n: 1\nmembers:\n  - [3/2, -1/2]\n", 3, "members[0][0]"),
        ("n: two\n", 1, "n"),
        ("n: 2\nkind: markov\n", 2, "kind"),
        ("n: 2\ncolour: red\n", 2, "colour"),
        ("n: 2\nkind: bernoulli-nml\nthetas: [1/2]\n", 3, "thetas"),
        ("n: 2\ngrid: 4\nthetas: [1/2]\n", 2, "grid"),
    ],
)
def test_errors_cite_line_and_field(text, line, field):
    with pytest.raises(ConfigError) as info:
        parse_family(text)
    assert info.value.line == line
    assert info.value.field == field
    assert f"line {line}" in str(info.value)


def test_missing_members_and_n():
    with pytest.raises(ConfigError, match="members"):
        parse_family("n: 2\n")
    with pytest.raises(ConfigError, match="n"):
        parse_family("kind: explicit\n")


def test_malformed_yaml_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_family("n: 2\nmembers: [1/2, \n  - x: ]\n")
    assert info.value.line is not None


def test_dump_roundtrip_and_fingerprint(tmp_path):
    fam = parse_family("n: 2\nthetas: [1/4, 3/4]\n")
    path = tmp_path / "f.yaml"
    path.write_text(dump_family(fam))
    again = load_family(path)
    assert again == fam
    assert fingerprint(again) == fingerprint(fam)
    assert len(fingerprint(fam)) == 32
    assert fingerprint(parse_family(DYADIC)) != fingerprint(fam)
    assert canonical_family(fam).startswith('{"kind":"explicit"')


def test_load_family_prefixes_path(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("n: 0\n")
    with pytest.raises(ConfigError, match="bad.yaml"):
        load_family(path)
