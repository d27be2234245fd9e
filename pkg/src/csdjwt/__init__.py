"""Compact selective disclosure for verifiable credentials.

An accumulator-based credential format (:mod:`csdjwt.csd`) next to the
SD-JWT (:mod:`csdjwt.sdjwt`) and Merkle-tree (:mod:`csdjwt.merkle`)
baselines, with a shared wire layer and benchmark harness.
"""

from .claims import Claim, canonicalize, hash_to_element
from .csd import (
    PresentationRequest,
    VerifiableCredential,
    VerifiablePresentation,
    generate_presentation,
    issue_credential,
    verify_presentation,
)
from .errors import RejectReason, Verdict
from .identity import Identity
from .merkle import mt_issue, mt_present, mt_verify
from .nonce import NonceStore, new_nonce
from .registry import DidDocument, Registry
from .sdjwt import sd_issue, sd_present, sd_verify
from .wire import SizeReport, decode_credential, decode_presentation, encode_credential, encode_presentation, measure

__version__ = "0.1.0"

__all__ = [
    "Claim",
    "DidDocument",
    "Identity",
    "NonceStore",
    "PresentationRequest",
    "Registry",
    "RejectReason",
    "SizeReport",
    "Verdict",
    "VerifiableCredential",
    "VerifiablePresentation",
    "canonicalize",
    "decode_credential",
    "decode_presentation",
    "encode_credential",
    "encode_presentation",
    "generate_presentation",
    "hash_to_element",
    "issue_credential",
    "measure",
    "mt_issue",
    "mt_present",
    "mt_verify",
    "new_nonce",
    "sd_issue",
    "sd_present",
    "sd_verify",
    "verify_presentation",
]
