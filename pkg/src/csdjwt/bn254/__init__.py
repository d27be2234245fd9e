"""Pure-Python BN254 (alt_bn128) groups, pairing and point encodings."""

from .curve import (
    G1_GEN,
    G2_GEN,
    G1FixedBase,
    g1_add,
    g1_msm,
    g1_mul,
    g1_neg,
    g1_on_curve,
    g2_add,
    g2_in_subgroup,
    g2_mul,
    g2_neg,
)
from .encoding import (
    G1_BYTES,
    G2_BYTES,
    PointDecodingError,
    g1_compress,
    g1_decompress,
    g2_compress,
    g2_decompress,
)
from .fields import P, R
from .pairing import G2Prepared, pairing, pairing_product_is_one, prepare_g2

__all__ = [
    "G1_BYTES",
    "G1_GEN",
    "G1FixedBase",
    "G2_BYTES",
    "G2_GEN",
    "G2Prepared",
    "P",
    "PointDecodingError",
    "R",
    "g1_add",
    "g1_compress",
    "g1_decompress",
    "g1_msm",
    "g1_mul",
    "g1_neg",
    "g1_on_curve",
    "g2_add",
    "g2_compress",
    "g2_decompress",
    "g2_in_subgroup",
    "g2_mul",
    "g2_neg",
    "pairing",
    "pairing_product_is_one",
    "prepare_g2",
]
