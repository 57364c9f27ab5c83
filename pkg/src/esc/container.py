"""Wire format for ciphertexts and the text format for key files.

Ciphertext layout, all integers big-endian::

    magic       4 bytes   b"ESC1"
    version     u8        1
    n           u16
    n_star      u16
    mode        u8        0 = entropic security, 1 = indistinguishability
    epsilon     f64       IEEE-754
    ell         u16
    modulus     ceil((ell + 1) / 8) bytes
    fingerprint 32 bytes  SHA-256 of the canonical family config
    bit length  u32
    payload     ceil(bit length / 8) bytes, zero-padded on the right

Key file::

    esc-key ell=<ell> modulus=0x<hex>
    <2*ell key bits as hex, zero-extended on the left to whole digits>
"""

from __future__ import annotations

import struct
from typing import Iterator

from .family import BitWord
from .sbcipher import Ciphertext, HeaderMismatch, Key, Mode

MAGIC = b"ESC1"
VERSION = 1

_HEAD = struct.Struct(">4sBHHBdH")


class FormatError(ValueError):
    pass


def _modulus_bytes(ell: int) -> int:
    return (ell + 1 + 7) // 8


def pack(c: Ciphertext) -> bytes:
    nbits = c.payload.length
    nbytes = (nbits + 7) // 8
    payload = (c.payload.value << (8 * nbytes - nbits)).to_bytes(nbytes, "big")
    return b"".join(
        [
            _HEAD.pack(MAGIC, c.version, c.n, c.n_star, c.mode.value, c.epsilon, c.ell),
            c.modulus.to_bytes(_modulus_bytes(c.ell), "big"),
            c.fingerprint,
            struct.pack(">I", nbits),
            payload,
        ]
    )


def unpack(data: bytes) -> Ciphertext:
    c, used = _unpack_from(data, 0)
    if used != len(data):
        raise FormatError(f"{len(data) - used} trailing bytes after ciphertext")
    return c


def _take(data: bytes, pos: int, k: int) -> bytes:
    if pos + k > len(data):
        raise FormatError("truncated ciphertext")
    return data[pos : pos + k]


def _unpack_from(data: bytes, pos: int) -> tuple[Ciphertext, int]:
    magic, version, n, n_star, mode, epsilon, ell = _HEAD.unpack(_take(data, pos, _HEAD.size))
    pos += _HEAD.size
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise HeaderMismatch(f"unsupported format version {version}")
    try:
        mode = Mode(mode)
    except ValueError:
        raise FormatError(f"unknown mode byte {mode}") from None
    mb = _modulus_bytes(ell)
    modulus = int.from_bytes(_take(data, pos, mb), "big")
    pos += mb
    fp = _take(data, pos, 32)
    pos += 32
    (nbits,) = struct.unpack(">I", _take(data, pos, 4))
    pos += 4
    nbytes = (nbits + 7) // 8
    raw = int.from_bytes(_take(data, pos, nbytes), "big")
    pos += nbytes
    spare = 8 * nbytes - nbits
    if raw & ((1 << spare) - 1):
        raise FormatError("nonzero padding bits in payload")
    payload = BitWord(nbits, raw >> spare)
    return Ciphertext(n, n_star, mode, epsilon, ell, modulus, fp, payload, version), pos


def iter_unpack(data: bytes) -> Iterator[Ciphertext]:
    """Read back-to-back ciphertexts."""
    pos = 0
    while pos < len(data):
        c, pos = _unpack_from(data, pos)
        yield c


def write_key(fh, key: Key, modulus: int) -> None:
    digits = (2 * key.ell + 3) // 4
    fh.write(f"esc-key ell={key.ell} modulus={modulus:#x}\n")
    fh.write(f"{key.value:0{digits}x}\n")


def read_key(text: str) -> tuple[Key, int]:
    """Parse a key file; returns the key and the modulus it names."""
    lines = text.split("\n")
    if len(lines) < 2:
        raise FormatError("key file needs a header line and a hex line")
    head = lines[0].split()
    if not head or head[0] != "esc-key":
        raise FormatError("line 1: missing 'esc-key' header")
    fields = {}
    for item in head[1:]:
        k, sep, v = item.partition("=")
        if not sep:
            raise FormatError(f"line 1: malformed header item {item!r}")
        fields[k] = v
    try:
        ell = int(fields["ell"])
        modulus = int(fields["modulus"], 16)
        value = int(lines[1].strip(), 16)
    except KeyError as exc:
        raise FormatError(f"line 1: header lacks {exc.args[0]}") from None
    except ValueError as exc:
        raise FormatError(f"malformed key file: {exc}") from None
    if any(s.strip() for s in lines[2:]):
        raise FormatError("unexpected content after line 2")
    try:
        return Key(ell, value), modulus
    except ValueError as exc:
        raise FormatError(f"line 2: {exc}") from None
