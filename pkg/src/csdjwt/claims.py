"""Claims and their mapping to accumulator elements."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .accumulator import DEFAULT_PARAMS, Element, SystemParams
from .errors import ClaimError
from .jose import canonical_json, sha256

ISS_DID_KEY = "iss_did"
SUB_DID_KEY = "sub_did"
RESERVED_KEYS = frozenset({ISS_DID_KEY, SUB_DID_KEY})


def _check_key(key: Any) -> None:
    if not isinstance(key, str) or not key:
        raise ClaimError("claim key must be a non-empty string")
    if any(ord(ch) < 0x20 or ord(ch) == 0x7F for ch in key):
        raise ClaimError(f"claim key contains control characters: {key!r}")
    # the key/value separator must stay unambiguous
    if ":" in key:
        raise ClaimError(f"claim key must not contain ':': {key!r}")


def _check_value(value: Any) -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise ClaimError("NaN and infinite values are not representable")
    if isinstance(value, (list, tuple)):
        for v in value:
            _check_value(v)
    elif isinstance(value, dict):
        for k, v in value.items():
            if not isinstance(k, str):
                raise ClaimError("object keys inside claim values must be strings")
            _check_value(v)
    elif value is not None and not isinstance(value, (str, int, float, bool)):
        raise ClaimError(f"unsupported claim value type: {type(value).__name__}")


@dataclass(frozen=True, eq=False)
class Claim:
    key: str
    value: Any

    def __post_init__(self):
        _check_key(self.key)
        _check_value(self.value)

    # equality follows the canonical bytes, so 1, 1.0 and True stay distinct
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Claim) and canonicalize(self) == canonicalize(other)

    def __hash__(self) -> int:
        return hash(canonicalize(self))


def canonicalize(claim: Claim) -> bytes:
    """``key:`` followed by the canonical JSON of the value, UTF-8 encoded."""
    try:
        return (claim.key + ":" + canonical_json(claim.value)).encode("utf-8")
    except ValueError as exc:
        raise ClaimError(str(exc)) from None


def claim_digest(claim: Claim) -> bytes:
    return sha256(canonicalize(claim))


def hash_to_element(claim: Claim, params: SystemParams = DEFAULT_PARAMS) -> Element:
    return int.from_bytes(claim_digest(claim), "big") % params.group_order


def parse_canonical(data: bytes) -> Claim:
    """Inverse of :func:`canonicalize`."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise ClaimError("claim bytes are not UTF-8") from None
    key, sep, rest = text.partition(":")
    if not sep:
        raise ClaimError("claim bytes lack the key separator")
    try:
        value = json.loads(rest)
    except json.JSONDecodeError as exc:
        raise ClaimError(f"claim value is not JSON: {exc}") from None
    claim = Claim(key, value)
    if canonicalize(claim) != data:
        raise ClaimError("claim bytes are not canonical")
    return claim


def claims_from_mapping(obj: Mapping[str, Any]) -> list[Claim]:
    """Each top-level member of a JSON object becomes one claim."""
    return [Claim(k, v) for k, v in obj.items()]


def check_unique_keys(claims: Iterable[Claim], *, allow_reserved: bool = False) -> None:
    seen = set()
    for c in claims:
        if c.key in seen:
            raise ClaimError(f"duplicate claim key: {c.key}")
        if not allow_reserved and c.key in RESERVED_KEYS:
            raise ClaimError(f"reserved claim key: {c.key}")
        seen.add(c.key)


def synthetic_claims(n: int) -> list[Claim]:
    """The benchmark corpus: claim_key_i -> claim_value_i for i = 1..n."""
    return [Claim(f"claim_key_{i}", f"claim_value_{i}") for i in range(1, n + 1)]
