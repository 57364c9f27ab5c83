"""Exact verification by enumeration.

Ciphertext distributions are computed exactly: the padded-message
distribution is XOR-convolved with the distribution of pads over all keys.
The convolution runs through an integer Walsh-Hadamard transform; a direct
loop over messages, filler bits and keys is kept as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .coding import CodeTable, build_code
from .family import BitWord, FamilySpec, Pmf, build_shtarkov
from .padding import delta_gap, delta_gap_mass, induced_pmf
from .sbcipher import (
    CipherParams,
    Key,
    Mode,
    SmallBiasSpace,
    build_space,
    ceil_log2,
    expand_key,
    pad_counts,
    plan_params,
)


class GuardError(RuntimeError):
    """An enumeration would exceed the configured size limits."""


@dataclass(frozen=True)
class Guards:
    max_n: int = 8
    max_n_star: int = 16
    max_ell: int = 12

    def check(self, n: int | None = None, n_star: int | None = None, ell: int | None = None) -> None:
        if n is not None and n > self.max_n:
            raise GuardError(f"n = {n} exceeds the enumeration limit {self.max_n}")
        if n_star is not None and n_star > self.max_n_star:
            raise GuardError(f"n_star = {n_star} exceeds the enumeration limit {self.max_n_star}")
        if ell is not None and ell > self.max_ell:
            raise GuardError(f"ell = {ell} exceeds the enumeration limit {self.max_ell}")


DEFAULT_GUARDS = Guards()


def walsh_hadamard(a: Sequence[int]) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform; exact on Python integers."""
    a = np.array(a, dtype=object)
    size = len(a)
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        b = a.reshape(-1, 2, h)
        a = np.stack((b[:, 0] + b[:, 1], b[:, 0] - b[:, 1]), axis=1).reshape(-1)
        h *= 2
    return a


def xor_convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """``c[v] = sum_w a[w] * b[v ^ w]`` for integer sequences of equal power-of-two length."""
    if len(a) != len(b):
        raise ValueError("length mismatch")
    prod = walsh_hadamard(a) * walsh_hadamard(b)
    size = len(a)
    return [int(x) // size for x in walsh_hadamard(prod)]


def _to_integers(probs: Sequence) -> tuple[list[int], int]:
    """Scale exact probabilities to integers over a common denominator."""
    fr = [Fraction(x) for x in probs]
    den = reduce(math.lcm, (x.denominator for x in fr), 1)
    return [x.numerator * (den // x.denominator) for x in fr], den


def exact_cipher_distribution(
    table: CodeTable,
    space: SmallBiasSpace | None,
    p: Pmf,
    pad: Sequence[int] | None = None,
    guards: Guards = DEFAULT_GUARDS,
) -> Pmf:
    """Exact distribution of ciphertexts for messages drawn from ``p``.

    ``pad`` optionally replaces the pad distribution of ``space`` with
    integer weights over the ``2**n_star`` pads; all-ones is a perfect
    one-time pad.
    """
    guards.check(n=table.n, n_star=table.n_star)
    pi, den = _to_integers(induced_pmf(table, p).probs)
    if pad is None:
        if space is None:
            raise ValueError("need a space or an explicit pad distribution")
        guards.check(ell=space.ell)
        if space.n_star != table.n_star:
            raise ValueError("space and code disagree on n_star")
        weights = [int(c) for c in pad_counts(space)]
    else:
        weights = [int(c) for c in pad]
        if len(weights) != len(pi):
            raise ValueError(f"pad distribution needs {len(pi)} weights")
    total = sum(weights) * den
    return Pmf(table.n_star, [Fraction(c, total) for c in xor_convolve(pi, weights)])


def exact_cipher_distribution_direct(
    table: CodeTable, space: SmallBiasSpace, p: Pmf, guards: Guards = DEFAULT_GUARDS
) -> Pmf:
    """Same as :func:`exact_cipher_distribution` by looping over message, filler and key."""
    guards.check(n=table.n, n_star=table.n_star, ell=space.ell)
    pads = [expand_key(space, Key(space.ell, k)).value for k in range(1 << (2 * space.ell))]
    ns = table.n_star
    counts = [0] * (1 << ns)
    _, den = _to_integers(p.probs)
    for i, u in enumerate(table.order):
        fill = ns - table.lengths[i]
        # weight of each (filler, key) pair, scaled by den * 2**ns
        w = int(Fraction(p.probs[u]) * den) << table.lengths[i]
        if not w:
            continue
        base = table.codewords[i] << fill
        for r in range(1 << fill):
            v = base | r
            for pad in pads:
                counts[v ^ pad] += w
    total = den * (1 << ns) * len(pads)
    return Pmf(ns, [Fraction(c, total) for c in counts])


def statistical_distance(a: Pmf | Sequence, b: Pmf | Sequence):
    pa = a.probs if isinstance(a, Pmf) else tuple(a)
    pb = b.probs if isinstance(b, Pmf) else tuple(b)
    if len(pa) != len(pb):
        raise ValueError(f"distributions of sizes {len(pa)} and {len(pb)}")
    return sum(abs(x - y) for x, y in zip(pa, pb)) / 2


def distance_to_uniform(a: Pmf):
    u = Fraction(1, len(a.probs))
    return sum(abs(x - u) for x in a.probs) / 2


def bias_spectrum(space: SmallBiasSpace, guards: Guards = DEFAULT_GUARDS) -> tuple[Fraction, BitWord]:
    """Largest ``|E_key (-1)^<s, pad>|`` over nonzero masks ``s``, and a mask attaining it."""
    guards.check(n_star=space.n_star, ell=space.ell)
    counts = pad_counts(space)
    spec = walsh_hadamard([int(c) for c in counts])
    mags = [abs(int(x)) for x in spec[1:]]
    j = max(range(len(mags)), key=mags.__getitem__)
    return Fraction(mags[j], int(counts.sum())), BitWord(space.n_star, j + 1)


@dataclass
class VerificationReport:
    n: int
    n_star: int
    epsilon: float
    mode: Mode
    s_p: Fraction
    delta_gap: float
    delta_bound: int
    delta_hat: float
    delta_req: float
    ell: int
    k_theory: int
    k_actual: int
    member_sd: list = field(default_factory=list)
    bias: Fraction | None = None
    bias_bound: float | None = None
    checks: dict = field(default_factory=dict)

    @property
    def max_sd(self):
        return max(self.member_sd) if self.member_sd else None

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_text(self) -> str:
        def num(x):
            return "-" if x is None else f"{float(x):.12g}"

        lines = [
            f"n = {self.n}",
            f"n_star = {self.n_star}",
            f"epsilon = {num(self.epsilon)}",
            f"mode = {self.mode}",
            f"S_P = {self.s_p} ({num(self.s_p)})",
            f"delta_gap = {num(self.delta_gap)}",
            f"delta_bound = {self.delta_bound}",
            f"delta_hat = {num(self.delta_hat)}",
            f"delta_req = {num(self.delta_req)}",
            f"ell = {self.ell}",
            f"k_theory = {self.k_theory}",
            f"k_actual = {self.k_actual}",
            f"bias = {num(self.bias)}",
            f"bias_bound = {num(self.bias_bound)}",
        ]
        for i, sd in enumerate(self.member_sd):
            lines.append(f"sd[{i}] = {num(sd)}")
        lines.append(f"max_sd = {num(self.max_sd)}")
        for name, ok in self.checks.items():
            lines.append(f"check {name} = {'pass' if ok else 'FAIL'}")
        lines.append(f"verdict = {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def indistinguishability_check(
    family: FamilySpec,
    table: CodeTable,
    space: SmallBiasSpace,
    params: CipherParams,
    guards: Guards = DEFAULT_GUARDS,
) -> list[Fraction]:
    """Statistical distance to uniform of the ciphertext distribution, per member."""
    guards.check(n=table.n, n_star=table.n_star, ell=space.ell)
    counts = [int(c) for c in pad_counts(space)]
    return [
        distance_to_uniform(exact_cipher_distribution(table, space, p, pad=counts, guards=guards))
        for p in family.enumerate_members()
    ]


def audit(
    family: FamilySpec,
    epsilon: float,
    mode: Mode = Mode.ENTROPIC,
    *,
    exact_delta: bool = False,
    constants: str = "proof",
    ell: int | None = None,
    guards: Guards = DEFAULT_GUARDS,
) -> VerificationReport:
    """Build the whole pipeline for ``family`` and check every bound.

    ``ell`` forces the field degree instead of the planner's choice.
    Failed checks are recorded in the report; only guard violations raise.
    """
    guards.check(n=family.n)
    model = build_shtarkov(family)
    table = build_code(model)
    guards.check(n_star=table.n_star)
    bound = ceil_log2(model.s_p) + 2
    mass = delta_gap_mass(table, family)
    gap = delta_gap(table, family)
    params = plan_params(
        model.s_p, table.n_star, epsilon, mode, gap if exact_delta else None, n=family.n, constants=constants
    )
    space = build_space(params, ell=ell)
    guards.check(ell=space.ell)

    report = VerificationReport(
        n=family.n,
        n_star=table.n_star,
        epsilon=params.epsilon,
        mode=mode,
        s_p=Fraction(model.s_p),
        delta_gap=gap,
        delta_bound=bound,
        delta_hat=params.delta_hat,
        delta_req=params.delta_req,
        ell=space.ell,
        k_theory=params.k_theory,
        k_actual=2 * space.ell,
    )
    # gap <= bound  <=>  max mass <= 2**(bound - n_star)
    report.checks["delta_gap"] = Fraction(mass) <= Fraction(2) ** (bound - table.n_star)
    report.bias, _ = bias_spectrum(space, guards)
    report.bias_bound = space.bias_bound
    report.checks["bias_bound"] = report.bias <= Fraction(space.n_star, 1 << space.ell)
    report.checks["bias_required"] = report.bias <= Fraction(params.delta_req)
    report.member_sd = indistinguishability_check(family, table, space, params, guards)
    report.checks["indistinguishability"] = max(report.member_sd) <= Fraction(params.epsilon)
    return report
