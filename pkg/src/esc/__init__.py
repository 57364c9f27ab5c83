"""Entropically secure short-key cipher for sources from a known family."""

from .coding import CodeTable, DecodeError, build_code, decode_prefix, encode
from .family import (
    BitWord,
    FamilyKind,
    FamilySpec,
    Pmf,
    ShtarkovModel,
    bernoulli_pmf,
    build_shtarkov,
    pmf_validate,
    ratio_check,
    uniform,
)
from .padding import InducedPmf, RandomSource, delta_gap, induced_pmf, min_entropy, phi, phi_inverse
from .sbcipher import (
    CipherParams,
    Ciphertext,
    Key,
    Mode,
    SmallBiasSpace,
    build_space,
    decrypt,
    encrypt,
    expand_key,
    plan_params,
)

__version__ = "0.1.0"
