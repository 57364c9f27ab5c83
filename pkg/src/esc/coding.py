"""Prefix-free Shannon code over the Shtarkov distribution.

Words are ranked by descending ``q`` (ties by ascending word value), rank
``i`` gets length ``ceil(-log2 q_i)``, and codewords are assigned
canonically: in rank order, each one the numerically smallest string of its
length that keeps the code prefix-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .family import BitWord, Prob, ShtarkovModel


class DecodeError(ValueError):
    """No codeword is a prefix of the input."""


def shannon_length(q: Prob) -> int:
    """``ceil(-log2 q)`` computed exactly for ``0 < q <= 1``."""
    q = Fraction(q)
    if not 0 < q <= 1:
        raise ValueError(f"probability out of range: {q}")
    a, b = q.numerator, q.denominator
    # smallest l >= 0 with a * 2**l >= b
    l = max((b // a).bit_length() - 1, 0)
    while (a << l) < b:
        l += 1
    return l


def length_bound_holds(length: int, q: Prob) -> bool:
    """Exact test of ``length < -log2 q + 2``, i.e. ``q * 2**length < 4``."""
    return Fraction(q) * (1 << length) < 4


@dataclass(frozen=True)
class CodeTable:
    """A ranked prefix-free code.

    ``order[i]`` is the word (integer) of rank ``i``; ``rank`` inverts it.
    ``lengths`` and ``codewords`` are indexed by rank. Only legal plaintexts
    are ranked.
    """

    n: int
    order: tuple
    probs: tuple
    lengths: tuple
    codewords: tuple
    n_star: int

    def __post_init__(self):
        object.__setattr__(self, "_rank", {u: i for i, u in enumerate(self.order)})
        # codeword lookup for prefix decoding: (length, value) -> rank
        object.__setattr__(
            self, "_by_code", {(l, c): i for i, (l, c) in enumerate(zip(self.lengths, self.codewords))}
        )

    @property
    def rank(self) -> dict:
        return self._rank

    def is_legal(self, u: BitWord) -> bool:
        return u.length == self.n and u.value in self._rank

    def codeword(self, i: int) -> BitWord:
        return BitWord(self.lengths[i], self.codewords[i])

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 1 << l) for l in self.lengths), Fraction(0))

    def is_prefix_free(self) -> bool:
        # canonical codes sort by (value left-aligned to n_star); a prefix pair must be adjacent
        width = self.n_star
        spans = sorted(
            (c << (width - l), l, c) for l, c in zip(self.lengths, self.codewords)
        )
        for (_, l1, c1), (_, l2, c2) in zip(spans, spans[1:]):
            if l1 <= l2 and (c2 >> (l2 - l1)) == c1:
                return False
            if l2 < l1 and (c1 >> (l1 - l2)) == c2:
                return False
        return True

    def dump(self) -> str:
        """Human-readable listing: rank, word, q, length, codeword."""
        rows = ["rank\tword\tq\tlength\tcodeword"]
        for i, u in enumerate(self.order):
            rows.append(
                f"{i + 1}\t{BitWord(self.n, u)}\t{self.probs[i]}\t{self.lengths[i]}\t{self.codeword(i)}"
            )
        return "\n".join(rows)


def build_code(model: ShtarkovModel) -> CodeTable:
    q = model.q.probs
    words = sorted(model.legal, key=lambda u: (-Fraction(q[u]), u))
    if not words:
        raise ValueError("model has no legal plaintexts")
    lengths = [shannon_length(q[u]) for u in words]
    codewords = []
    code, prev = 0, lengths[0]
    for i, l in enumerate(lengths):
        if i:
            code = (code + 1) << (l - prev)
        if code >> l:
            raise ValueError("Kraft sum exceeds 1; the length profile admits no prefix code")
        codewords.append(code)
        prev = l
    table = CodeTable(
        n=model.n,
        order=tuple(words),
        probs=tuple(q[u] for u in words),
        lengths=tuple(lengths),
        codewords=tuple(codewords),
        n_star=max(lengths),
    )
    if table.kraft_sum() > 1:
        raise ValueError("Kraft sum exceeds 1")
    return table


def encode(table: CodeTable, u: BitWord) -> BitWord:
    if not table.is_legal(u):
        raise ValueError(f"{u} is not a legal plaintext for this code")
    return table.codeword(table.rank[u.value])


def decode_prefix(table: CodeTable, v: BitWord) -> tuple[BitWord, int]:
    """Find the codeword that prefixes ``v``; return its word and length."""
    by_code = table._by_code
    for l in sorted(set(table.lengths)):
        if l > v.length:
            break
        i = by_code.get((l, v.value >> (v.length - l)))
        if i is not None:
            return BitWord(table.n, table.order[i]), l
    raise DecodeError(f"no codeword is a prefix of {v}")
