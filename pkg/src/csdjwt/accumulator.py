"""Positive bilinear-map accumulator over BN254.

    V = prod(y_i + alpha) * V0            (accumulation, needs the trapdoor)
    W_i = (y_i + alpha)^-1 * V            (witness of y_i)
    e(W_i, y_i * G2 + alpha * G2) == e(V, G2)

Values and witnesses are G1 points (32 bytes compressed), the public key a
G2 point (64 bytes compressed).
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import bn254
from .bn254 import G1_GEN, G2_GEN, R
from .errors import AccumulatorError, DecodeError

Element = int

CURVE = "bn254"
PAIRING = "bn254-optimal-ate"
SUPPORTED_SECURITY_LEVELS = (128,)

# batch verification uses random 128-bit multipliers
_BATCH_BITS = 128


@dataclass(frozen=True)
class SystemParams:
    group_order: int = R
    generator_g1: tuple = G1_GEN
    generator_g2: tuple = G2_GEN
    pairing: str = PAIRING
    security_level: int = 128

    @property
    def g1_bytes(self) -> int:
        return bn254.G1_BYTES

    @property
    def g2_bytes(self) -> int:
        return bn254.G2_BYTES


DEFAULT_PARAMS = SystemParams()


@dataclass(frozen=True)
class AccumulatorSecretKey:
    alpha: int = field(repr=False)

    def __post_init__(self):
        if not 0 < self.alpha < R:
            raise AccumulatorError("trapdoor must lie in [1, r-1]")

    def to_bytes(self) -> bytes:
        return self.alpha.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "AccumulatorSecretKey":
        if len(data) != 32:
            raise DecodeError("accumulator secret key must be 32 bytes")
        alpha = int.from_bytes(data, "big")
        if not 0 < alpha < R:
            raise DecodeError("accumulator secret key out of range")
        return cls(alpha)

    def public_key(self) -> "AccumulatorPublicKey":
        return AccumulatorPublicKey(bn254.g2_mul(G2_GEN, self.alpha))


@dataclass(frozen=True)
class AccumulatorPublicKey:
    q_tilde: tuple

    def __post_init__(self):
        if self.q_tilde is None:
            raise AccumulatorError("public key must not be the identity")

    def to_bytes(self) -> bytes:
        return bn254.g2_compress(self.q_tilde)

    @classmethod
    def from_bytes(cls, data: bytes) -> "AccumulatorPublicKey":
        try:
            point = bn254.g2_decompress(data)
        except bn254.PointDecodingError as exc:
            raise DecodeError(str(exc)) from None
        if point is None:
            raise DecodeError("public key must not be the identity")
        return cls(point)

    @property
    def prepared(self) -> bn254.G2Prepared:
        return bn254.prepare_g2(self.q_tilde)


@dataclass(frozen=True)
class _G1Element:
    point: tuple

    def to_bytes(self) -> bytes:
        return bn254.g1_compress(self.point)

    @classmethod
    def from_bytes(cls, data: bytes):
        try:
            return cls(bn254.g1_decompress(data))
        except bn254.PointDecodingError as exc:
            raise DecodeError(str(exc)) from None


class AccumulatorValue(_G1Element):
    pass


class Witness(_G1Element):
    pass


def setup(security_level: int = 128) -> tuple[SystemParams, AccumulatorSecretKey, AccumulatorPublicKey]:
    if security_level not in SUPPORTED_SECURITY_LEVELS:
        raise AccumulatorError(f"unsupported security level: {security_level}")
    sk = AccumulatorSecretKey(secrets.randbelow(R - 1) + 1)
    return SystemParams(security_level=security_level), sk, sk.public_key()


def keypair_from_seed(seed: bytes) -> tuple[AccumulatorSecretKey, AccumulatorPublicKey]:
    """Deterministic trapdoor, for fixtures and reproducible benchmarks."""
    sk = AccumulatorSecretKey(_seeded_scalar(b"csdjwt/alpha", seed))
    return sk, sk.public_key()


def _seeded_scalar(tag: bytes, seed: bytes) -> int:
    counter = 0
    while True:
        digest = hashlib.sha256(tag + seed + counter.to_bytes(4, "big")).digest()
        s = int.from_bytes(digest, "big") % R
        if s:
            return s
        counter += 1


def init_accumulator(params: SystemParams = DEFAULT_PARAMS, rng_seed: bytes | None = None) -> AccumulatorValue:
    if rng_seed is None:
        s = secrets.randbelow(R - 1) + 1
    else:
        s = _seeded_scalar(b"csdjwt/v0", rng_seed)
    return AccumulatorValue(bn254.g1_mul(params.generator_g1, s))


def _check_elements(elements: Sequence[Element], sk: AccumulatorSecretKey) -> None:
    seen = set()
    collision = (-sk.alpha) % R
    for y in elements:
        if not isinstance(y, int) or not 0 <= y < R:
            raise AccumulatorError(f"element out of range: {y!r}")
        if y in seen:
            raise AccumulatorError("duplicate element")
        if y == collision:
            raise AccumulatorError("element collides with the trapdoor")
        seen.add(y)


def _scalar_product(elements: Iterable[Element], alpha: int) -> int:
    prod = 1
    for y in elements:
        prod = prod * (y + alpha) % R
    return prod


def accumulate_batch(value: AccumulatorValue, elements: Sequence[Element], sk: AccumulatorSecretKey) -> AccumulatorValue:
    _check_elements(elements, sk)
    if not elements:
        return value
    return AccumulatorValue(bn254.g1_mul(value.point, _scalar_product(elements, sk.alpha)))


def _batch_inverse(values: list[int]) -> list[int]:
    prefix = []
    acc = 1
    for v in values:
        prefix.append(acc)
        acc = acc * v % R
    inv = pow(acc, -1, R)
    out = [0] * len(values)
    for i in range(len(values) - 1, -1, -1):
        out[i] = inv * prefix[i] % R
        inv = inv * values[i] % R
    return out


def compute_witnesses_batch(value: AccumulatorValue, elements: Sequence[Element], sk: AccumulatorSecretKey) -> list[Witness]:
    _check_elements(elements, sk)
    if not elements:
        return []
    factors = [(y + sk.alpha) % R for y in elements]
    if any(f == 0 for f in factors):
        raise AccumulatorError("non-invertible witness factor")
    inverses = _batch_inverse(factors)
    if len(elements) < 8:
        return [Witness(bn254.g1_mul(value.point, k)) for k in inverses]
    table = bn254.G1FixedBase(value.point)
    return [Witness(pt) for pt in table.mul_many(inverses)]


def verify_witness(
    value: AccumulatorValue,
    element: Element,
    witness: Witness,
    pk: AccumulatorPublicKey,
    params: SystemParams = DEFAULT_PARAMS,
) -> bool:
    """e(W, y*G2 + Q) == e(V, G2), checked as e(y*W - V, G2) * e(W, Q) == 1."""
    if value.point is None or witness.point is None:
        return False
    lhs = bn254.g1_add(bn254.g1_mul(witness.point, element % R), bn254.g1_neg(value.point))
    return bn254.pairing_product_is_one(
        [(lhs, bn254.prepare_g2(params.generator_g2)), (witness.point, pk.prepared)]
    )


def verify_witnesses_batch(
    value: AccumulatorValue,
    pairs: Sequence[tuple[Element, Witness]],
    pk: AccumulatorPublicKey,
    params: SystemParams = DEFAULT_PARAMS,
) -> bool:
    """All-or-nothing check of many witnesses with one pairing product.

    Each equation is scaled by an independent random 128-bit factor, so a
    single bad witness slips through with probability about 2^-128.
    """
    if not pairs:
        return True
    if value.point is None or any(w.point is None for _, w in pairs):
        return False
    if len(pairs) == 1:
        (y, w), = pairs
        return verify_witness(value, y, w, pk, params)
    rs = [secrets.randbits(_BATCH_BITS) | 1 for _ in pairs]
    points = [w.point for _, w in pairs]
    scaled = bn254.g1_msm(points + [value.point], [r * y % R for r, (y, _) in zip(rs, pairs)] + [-sum(rs)])
    combined = bn254.g1_msm(points, rs)
    return bn254.pairing_product_is_one(
        [(scaled, bn254.prepare_g2(params.generator_g2)), (combined, pk.prepared)]
    )
