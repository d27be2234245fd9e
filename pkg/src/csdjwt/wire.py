"""One entry point for encoding, decoding and measuring all three mechanisms.

Every token starts with a compact JWS whose header ``typ`` names the
format: ``csd-jwt`` / ``csd-vp``, ``sd-jwt`` or ``mt-sd``. Stored
credentials end with ``~``; presentations end with a signature-bearing
segment, which tells the two apart.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Union

from . import csd, merkle, sdjwt
from .errors import DecodeError
from .jose import b64u_decode, json_from_b64u

MECHANISMS = ("csd", "sd", "mt")

Credential = Union[csd.VerifiableCredential, sdjwt.SdJwtCredential, merkle.MerkleCredential]
Presentation = Union[csd.VerifiablePresentation, sdjwt.SdJwtPresentation, merkle.MerklePresentation]

_CREDENTIALS = {
    csd.FORMAT: csd.VerifiableCredential,
    sdjwt.FORMAT: sdjwt.SdJwtCredential,
    merkle.FORMAT: merkle.MerkleCredential,
}
_PRESENTATIONS = {
    csd.VP_FORMAT: csd.VerifiablePresentation,
    sdjwt.FORMAT: sdjwt.SdJwtPresentation,
    merkle.FORMAT: merkle.MerklePresentation,
}
_MECHANISM_OF = {
    csd.VerifiableCredential: "csd",
    csd.VerifiablePresentation: "csd",
    sdjwt.SdJwtCredential: "sd",
    sdjwt.SdJwtPresentation: "sd",
    merkle.MerkleCredential: "mt",
    merkle.MerklePresentation: "mt",
}


def format_tag(token: str) -> str:
    if not isinstance(token, str) or not token:
        raise DecodeError("empty token")
    head = token.split("~", 1)[0].split(".", 1)[0]
    header = json_from_b64u(head)
    if not isinstance(header, dict) or not isinstance(header.get("typ"), str):
        raise DecodeError("token header lacks a typ")
    return header["typ"]


def mechanism_of(obj) -> str:
    try:
        return _MECHANISM_OF[type(obj)]
    except KeyError:
        raise TypeError(f"not a protocol object: {type(obj).__name__}") from None


def encode_credential(cred: Credential) -> str:
    if type(cred) not in _CREDENTIALS.values():
        raise TypeError(f"not a credential: {type(cred).__name__}")
    return cred.to_compact()


def encode_presentation(pres: Presentation) -> str:
    if type(pres) not in _PRESENTATIONS.values():
        raise TypeError(f"not a presentation: {type(pres).__name__}")
    return pres.to_compact()


def encode(obj) -> str:
    mechanism_of(obj)
    return obj.to_compact()


def decode_credential(token: str) -> Credential:
    tag = format_tag(token)
    cls = _CREDENTIALS.get(tag)
    if cls is None:
        raise DecodeError(f"unknown credential format: {tag!r}")
    return _decode(cls, token)


def decode_presentation(token: str) -> Presentation:
    tag = format_tag(token)
    cls = _PRESENTATIONS.get(tag)
    if cls is None:
        raise DecodeError(f"unknown presentation format: {tag!r}")
    return _decode(cls, token)


def decode(token: str):
    """Decode either kind of token, telling them apart by the trailing ``~``."""
    if token.endswith("~"):
        return decode_credential(token)
    return decode_presentation(token)


def _decode(cls, token: str):
    try:
        return cls.from_compact(token)
    except DecodeError:
        raise
    except (ValueError, TypeError, KeyError, AttributeError, IndexError) as exc:
        raise DecodeError(f"malformed {cls.__name__}: {exc}") from None


def raw_size(token: str) -> int:
    """Bytes of the token with every base64url segment counted decoded.

    Separators count one byte each; this is the structural size before
    base64 expansion.
    """
    total = 0
    for part in token.split("~"):
        for seg in part.split("."):
            total += len(b64u_decode(seg)) if seg else 0
        total += part.count(".")
    return total + token.count("~")


@dataclass(frozen=True)
class SizeReport:
    mechanism: str
    total_claims: int | None
    disclosed: int | None
    credential_bytes: int | None
    presentation_bytes: int | None
    credential_raw_bytes: int | None = None
    presentation_raw_bytes: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def _total_claims(cred: Credential) -> int:
    if isinstance(cred, csd.VerifiableCredential):
        return len(cred.user_claims)
    return len(cred.disclosures)


def _disclosed(pres: Presentation) -> int:
    if isinstance(pres, csd.VerifiablePresentation):
        return len(pres.disclosed_claims)
    return len(pres.disclosures)


def measure(credential: Credential | None = None, presentation: Presentation | None = None) -> SizeReport:
    """Byte counts on the exact UTF-8 wire strings.

    CSD totals count user claims only; the two DID claims every CSD
    credential and presentation carry are part of the measured bytes but
    not of ``total_claims`` / ``disclosed``.
    """
    if credential is None and presentation is None:
        raise ValueError("nothing to measure")
    mech = mechanism_of(credential if credential is not None else presentation)
    if presentation is not None and mechanism_of(presentation) != mech:
        raise ValueError("credential and presentation use different mechanisms")
    cred_tok = credential.to_compact() if credential is not None else None
    pres_tok = presentation.to_compact() if presentation is not None else None
    return SizeReport(
        mechanism=mech,
        total_claims=_total_claims(credential) if credential is not None else None,
        disclosed=_disclosed(presentation) if presentation is not None else None,
        credential_bytes=len(cred_tok.encode("utf-8")) if cred_tok is not None else None,
        presentation_bytes=len(pres_tok.encode("utf-8")) if pres_tok is not None else None,
        credential_raw_bytes=raw_size(cred_tok) if cred_tok is not None else None,
        presentation_raw_bytes=raw_size(pres_tok) if pres_tok is not None else None,
    )
