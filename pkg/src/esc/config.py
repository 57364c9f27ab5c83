"""Family configuration files.

A family file is a YAML mapping::

    n: 2                     # message length in bits
    kind: explicit           # explicit | bernoulli-nml
    members:                 # explicit: rows of 2**n probabilities,
      - [1/2, 1/4, 1/8, 1/8] #   word 00...0 first, 11...1 last
    thetas: [1/4, 3/4]       # explicit: i.i.d. Bernoulli members (optional)
    grid: 64                 # bernoulli-nml: theta grid for enumeration

Probabilities are integers, decimals (``0.125``) or ratios (``1/8``) and are
read as exact fractions; each row must sum to exactly 1. An explicit family
needs ``members``, ``thetas`` or both; rows come first, then one member per
theta.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

import yaml

from .family import FamilyKind, FamilySpec, Pmf, bernoulli_pmf, pmf_validate

_KEYS = {"n", "kind", "members", "thetas", "grid"}


class ConfigError(ValueError):
    def __init__(self, msg: str, line: int | None = None, field: str | None = None):
        self.line, self.field = line, field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        super().__init__(f"{': '.join(where)}: {msg}" if where else msg)


def _line(node) -> int:
    return node.start_mark.line + 1


def _scalar(node, field: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError("expected a single value", _line(node), field)
    return node.value


def _int(node, field: str) -> int:
    s = _scalar(node, field)
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"expected an integer, got {s!r}", _line(node), field) from None


def _prob(node, field: str) -> Fraction:
    s = _scalar(node, field)
    try:
        x = Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a probability: {s!r}", _line(node), field) from None
    if not 0 <= x <= 1:
        raise ConfigError(f"probability {s} outside [0, 1]", _line(node), field)
    return x


def _seq(node, field: str):
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError("expected a list", _line(node), field)
    return node.value


def parse_family(text: str) -> FamilySpec:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {getattr(exc, 'problem', exc)}", mark.line + 1 if mark else None) from None
    if root is None or not isinstance(root, yaml.MappingNode):
        raise ConfigError("family file must be a mapping", _line(root) if root is not None else 1)
    fields = {}
    for k, v in root.value:
        key = _scalar(k, "key")
        if key not in _KEYS:
            raise ConfigError(f"unknown field (allowed: {', '.join(sorted(_KEYS))})", _line(k), key)
        if key in fields:
            raise ConfigError("duplicate field", _line(k), key)
        fields[key] = v
    if "n" not in fields:
        raise ConfigError("missing required field", None, "n")
    n = _int(fields["n"], "n")
    if not 1 <= n <= 24:
        raise ConfigError(f"n must lie in 1..24, got {n}", _line(fields["n"]), "n")
    kind_s = _scalar(fields["kind"], "kind") if "kind" in fields else "explicit"
    try:
        kind = FamilyKind(kind_s)
    except ValueError:
        raise ConfigError(
            f"unknown kind {kind_s!r} (expected explicit or bernoulli-nml)", _line(fields["kind"]), "kind"
        ) from None

    if kind is FamilyKind.BERNOULLI_NML:
        for bad in ("members", "thetas"):
            if bad in fields:
                raise ConfigError("not allowed for kind bernoulli-nml", _line(fields[bad]), bad)
        grid = _int(fields["grid"], "grid") if "grid" in fields else 64
        if grid < 1:
            raise ConfigError("grid must be positive", _line(fields["grid"]), "grid")
        return FamilySpec.bernoulli_nml(n, grid)

    if "grid" in fields:
        raise ConfigError("only allowed for kind bernoulli-nml", _line(fields["grid"]), "grid")
    members = []
    for i, row in enumerate(_seq(fields["members"], "members") if "members" in fields else []):
        name = f"members[{i}]"
        entries = _seq(row, name)
        if len(entries) != 1 << n:
            raise ConfigError(f"expected {1 << n} probabilities, got {len(entries)}", _line(row), name)
        p = Pmf(n, [_prob(e, f"{name}[{j}]") for j, e in enumerate(entries)])
        if not pmf_validate(p):
            raise ConfigError(f"probabilities sum to {sum(p.probs)}, not 1", _line(row), name)
        members.append(p)
    for i, t in enumerate(_seq(fields["thetas"], "thetas") if "thetas" in fields else []):
        members.append(bernoulli_pmf(n, _prob(t, f"thetas[{i}]")))
    if not members:
        raise ConfigError("explicit family needs 'members' or 'thetas'", _line(root), "members")
    return FamilySpec.explicit(members)


def load_family(path: str | Path) -> FamilySpec:
    path = Path(path)
    try:
        return parse_family(path.read_text())
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def canonical_family(family: FamilySpec) -> str:
    """Stable JSON text identifying the family; explicit members are listed as exact ratios."""
    doc: dict = {"n": family.n, "kind": family.kind.value}
    if family.kind is FamilyKind.EXPLICIT:
        doc["members"] = [[str(Fraction(x)) for x in m.probs] for m in family.members]
    else:
        doc["grid"] = family.grid
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def fingerprint(family: FamilySpec) -> bytes:
    return hashlib.sha256(canonical_family(family).encode()).digest()


def dump_family(family: FamilySpec) -> str:
    """YAML text that :func:`parse_family` reads back to the same family."""
    lines = [f"n: {family.n}", f"kind: {family.kind.value}"]
    if family.kind is FamilyKind.EXPLICIT:
        lines.append("members:")
        for m in family.members:
            lines.append("  - [" + ", ".join(str(Fraction(x)) for x in m.probs) + "]")
    else:
        lines.append(f"grid: {family.grid}")
    return "\n".join(lines) + "\n"
