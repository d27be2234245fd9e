"""Compressed point encodings.

G1 takes 32 bytes and G2 takes 64, both big-endian. The top two bits of
the first byte are flags: 0x80 marks the larger of the two y roots, and
0x40 marks the identity. For G2 the x coordinate is written as
``c1 || c0``. Larger-root comparisons go lexicographically, c1 first.
"""

from __future__ import annotations

from .curve import G1_B, G2_B, g1_on_curve, g2_in_subgroup
from .fields import P, fp2_add, fp2_is_larger, fp2_mul, fp2_neg, fp2_sqr, fp2_sqrt, fp_sqrt

G1_BYTES = 32
G2_BYTES = 64

_FLAG_LARGE = 0x80
_FLAG_INF = 0x40
_FLAG_MASK = 0xC0


class PointDecodingError(ValueError):
    pass


def _is_larger(y: int) -> bool:
    return y > (P - 1) // 2


def g1_compress(pt) -> bytes:
    if pt is None:
        out = bytearray(G1_BYTES)
        out[0] = _FLAG_INF
        return bytes(out)
    x, y = pt
    out = bytearray(x.to_bytes(G1_BYTES, "big"))
    if _is_larger(y):
        out[0] |= _FLAG_LARGE
    return bytes(out)


def g1_decompress(data: bytes):
    if len(data) != G1_BYTES:
        raise PointDecodingError(f"G1 encoding must be {G1_BYTES} bytes, got {len(data)}")
    flags = data[0] & _FLAG_MASK
    x = int.from_bytes(bytes([data[0] & ~_FLAG_MASK & 0xFF]) + data[1:], "big")
    if flags & _FLAG_INF:
        if flags != _FLAG_INF or x:
            raise PointDecodingError("non-canonical identity encoding")
        return None
    if x >= P:
        raise PointDecodingError("x coordinate out of range")
    y = fp_sqrt((x * x * x + G1_B) % P)
    if y is None:
        raise PointDecodingError("x is not on the curve")
    if _is_larger(y) != bool(flags & _FLAG_LARGE):
        y = (-y) % P
    if y == 0 and flags & _FLAG_LARGE:
        raise PointDecodingError("non-canonical sign flag")
    pt = (x, y)
    # G1 has cofactor 1, being on the curve is enough
    if not g1_on_curve(pt):
        raise PointDecodingError("point is not on the curve")
    return pt


def g2_compress(pt) -> bytes:
    if pt is None:
        out = bytearray(G2_BYTES)
        out[0] = _FLAG_INF
        return bytes(out)
    (x0, x1), y = pt
    out = bytearray(x1.to_bytes(32, "big") + x0.to_bytes(32, "big"))
    if fp2_is_larger(y):
        out[0] |= _FLAG_LARGE
    return bytes(out)


def g2_decompress(data: bytes):
    """Decode a G2 point and check that it lies in the order-r subgroup."""
    if len(data) != G2_BYTES:
        raise PointDecodingError(f"G2 encoding must be {G2_BYTES} bytes, got {len(data)}")
    flags = data[0] & _FLAG_MASK
    x1 = int.from_bytes(bytes([data[0] & ~_FLAG_MASK & 0xFF]) + data[1:32], "big")
    x0 = int.from_bytes(data[32:], "big")
    if flags & _FLAG_INF:
        if flags != _FLAG_INF or x0 or x1:
            raise PointDecodingError("non-canonical identity encoding")
        return None
    if x0 >= P or x1 >= P:
        raise PointDecodingError("x coordinate out of range")
    x = (x0, x1)
    y = fp2_sqrt(fp2_add(fp2_mul(fp2_sqr(x), x), G2_B))
    if y is None:
        raise PointDecodingError("x is not on the twist")
    if fp2_is_larger(y) != bool(flags & _FLAG_LARGE):
        y = fp2_neg(y)
    if y == (0, 0) and flags & _FLAG_LARGE:
        raise PointDecodingError("non-canonical sign flag")
    pt = (x, y)
    if not g2_in_subgroup(pt):
        raise PointDecodingError("point is not in the prime-order subgroup")
    return pt
