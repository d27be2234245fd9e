"""G1 and G2 group arithmetic on BN254.

G1: y^2 = x^3 + 3 over Fp.  G2: y^2 = x^3 + 3/xi over Fp2 (D-type twist).

Points travel as affine tuples ``(x, y)`` with ``None`` for the identity;
the scalar multiplication routines work internally in Jacobian coordinates
``(X, Y, Z)`` with ``Z == 0`` marking the identity.
"""

from __future__ import annotations

from .fields import (
    FP2_ONE,
    FP2_ZERO,
    P,
    R,
    fp2_add,
    fp2_conj,
    fp2_dbl,
    fp2_inv,
    fp2_mul,
    fp2_mul_xi,
    fp2_neg,
    fp2_scale,
    fp2_sqr,
    fp2_sub,
    fp_inv,
    FROB1,
    FROB2,
)

G1_B = 3
G2_B = fp2_mul((3, 0), fp2_inv((9, 1)))

G1_GEN = (1, 2)
G2_GEN = (
    (
        10857046999023057135944570762232829481370756359578518086990519993285655852781,
        11559732032986387107991004021392285783925812861821192530917403151452391805634,
    ),
    (
        8495653923123431417604973247489272438418190587263600148770280649306958101930,
        4082367875863433681332203403145435568316851327593401208105741076214120093531,
    ),
)

_J1_INF = (1, 1, 0)
_J2_INF = (FP2_ONE, FP2_ONE, FP2_ZERO)


# --- G1 ---------------------------------------------------------------------

def g1_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    return (y * y - x * x * x - G1_B) % P == 0


def g1_neg(pt):
    if pt is None:
        return None
    return (pt[0], (-pt[1]) % P)


def _j1_double(pt):
    X, Y, Z = pt
    if Z == 0 or Y == 0:
        return _J1_INF
    A = X * X % P
    B = Y * Y % P
    C = B * B % P
    D = 2 * ((X + B) * (X + B) - A - C) % P
    E = 3 * A % P
    X3 = (E * E - 2 * D) % P
    Y3 = (E * (D - X3) - 8 * C) % P
    Z3 = 2 * Y * Z % P
    return (X3, Y3, Z3)


def _j1_add(p1, p2):
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    if Z1 == 0:
        return p2
    if Z2 == 0:
        return p1
    Z1Z1 = Z1 * Z1 % P
    Z2Z2 = Z2 * Z2 % P
    U1 = X1 * Z2Z2 % P
    U2 = X2 * Z1Z1 % P
    S1 = Y1 * Z2 * Z2Z2 % P
    S2 = Y2 * Z1 * Z1Z1 % P
    H = (U2 - U1) % P
    rr = (S2 - S1) % P
    if H == 0:
        if rr == 0:
            return _j1_double(p1)
        return _J1_INF
    HH = H * H % P
    HHH = H * HH % P
    V = U1 * HH % P
    X3 = (rr * rr - HHH - 2 * V) % P
    Y3 = (rr * (V - X3) - S1 * HHH) % P
    Z3 = Z1 * Z2 * H % P
    return (X3, Y3, Z3)


def _j1_add_affine(p1, q):
    """Mixed addition: Jacobian ``p1`` plus affine, non-identity ``q``."""
    X1, Y1, Z1 = p1
    if Z1 == 0:
        return (q[0], q[1], 1)
    x2, y2 = q
    Z1Z1 = Z1 * Z1 % P
    U2 = x2 * Z1Z1 % P
    S2 = y2 * Z1 * Z1Z1 % P
    H = (U2 - X1) % P
    rr = (S2 - Y1) % P
    if H == 0:
        if rr == 0:
            return _j1_double(p1)
        return _J1_INF
    HH = H * H % P
    HHH = H * HH % P
    V = X1 * HH % P
    X3 = (rr * rr - HHH - 2 * V) % P
    Y3 = (rr * (V - X3) - Y1 * HHH) % P
    Z3 = Z1 * H % P
    return (X3, Y3, Z3)


def _j1_to_affine(pt):
    X, Y, Z = pt
    if Z == 0:
        return None
    zi = fp_inv(Z)
    zi2 = zi * zi % P
    return (X * zi2 % P, Y * zi2 * zi % P)


def _j1_batch_to_affine(points):
    """Normalise many Jacobian points with a single field inversion."""
    zs = [pt[2] for pt in points]
    acc = 1
    prefix = []
    for z in zs:
        prefix.append(acc)
        if z:
            acc = acc * z % P
    inv = fp_inv(acc) if acc != 1 or any(zs) else 1
    out = [None] * len(points)
    for i in range(len(points) - 1, -1, -1):
        X, Y, Z = points[i]
        if Z == 0:
            continue
        zi = inv * prefix[i] % P
        inv = inv * Z % P
        zi2 = zi * zi % P
        out[i] = (X * zi2 % P, Y * zi2 * zi % P)
    return out


def g1_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return _j1_to_affine(_j1_add_affine((a[0], a[1], 1), b))


def g1_double(a):
    if a is None:
        return None
    return _j1_to_affine(_j1_double((a[0], a[1], 1)))


def _wnaf(k: int, width: int) -> list[int]:
    digits = []
    full = 1 << width
    half = full >> 1
    while k:
        if k & 1:
            d = k & (full - 1)
            if d >= half:
                d -= full
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits


def g1_mul(pt, k: int):
    """Variable-base scalar multiplication (width-5 wNAF)."""
    k %= R
    if pt is None or k == 0:
        return None
    # odd multiples pt, 3pt, ..., 15pt in affine form
    twice = _j1_double((pt[0], pt[1], 1))
    table_j = [(pt[0], pt[1], 1)]
    for _ in range(7):
        table_j.append(_j1_add(table_j[-1], twice))
    table = _j1_batch_to_affine(table_j)
    neg_table = [(q[0], (-q[1]) % P) for q in table]
    acc = _J1_INF
    for d in reversed(_wnaf(k, 5)):
        acc = _j1_double(acc)
        if d > 0:
            acc = _j1_add_affine(acc, table[d >> 1])
        elif d < 0:
            acc = _j1_add_affine(acc, neg_table[(-d) >> 1])
    return _j1_to_affine(acc)


class G1FixedBase:
    """Precomputed windows for repeated multiplication of one G1 point.

    With 4-bit windows a 254-bit scalar costs at most 64 mixed additions and
    no doublings, which pays off after a handful of multiplications.
    """

    WINDOW = 4

    def __init__(self, pt):
        if pt is None:
            raise ValueError("cannot build a table for the identity")
        self.point = pt
        w = self.WINDOW
        n_windows = (R.bit_length() + w - 1) // w
        rows = []
        base = (pt[0], pt[1], 1)
        for _ in range(n_windows):
            row = [base]
            for _ in range((1 << w) - 2):
                row.append(_j1_add(row[-1], base))
            rows.append(row)
            for _ in range(w):
                base = _j1_double(base)
        flat = _j1_batch_to_affine([q for row in rows for q in row])
        size = (1 << w) - 1
        self._rows = [flat[i * size:(i + 1) * size] for i in range(n_windows)]

    def mul(self, k: int):
        k %= R
        mask = (1 << self.WINDOW) - 1
        acc = _J1_INF
        for row in self._rows:
            if not k:
                break
            d = k & mask
            if d:
                q = row[d - 1]
                if q is not None:
                    acc = _j1_add_affine(acc, q)
            k >>= self.WINDOW
        return _j1_to_affine(acc)

    def mul_many(self, scalars) -> list:
        mask = (1 << self.WINDOW) - 1
        out = []
        for k in scalars:
            k %= R
            acc = _J1_INF
            for row in self._rows:
                if not k:
                    break
                d = k & mask
                if d:
                    q = row[d - 1]
                    if q is not None:
                        acc = _j1_add_affine(acc, q)
                k >>= self.WINDOW
            out.append(acc)
        return _j1_batch_to_affine(out)


def g1_msm(points, scalars):
    """Multi-scalar multiplication sum(k_i * P_i) with the bucket method."""
    pairs = [(pt, k % R) for pt, k in zip(points, scalars) if pt is not None and k % R]
    if not pairs:
        return None
    if len(pairs) < 4:
        acc = None
        for pt, k in pairs:
            acc = g1_add(acc, g1_mul(pt, k))
        return acc
    c = 4 if len(pairs) < 32 else 5 if len(pairs) < 128 else 6
    mask = (1 << c) - 1
    n_windows = (R.bit_length() + c - 1) // c
    acc = _J1_INF
    for win in range(n_windows - 1, -1, -1):
        for _ in range(c):
            acc = _j1_double(acc)
        shift = win * c
        buckets = [_J1_INF] * mask
        for pt, k in pairs:
            d = (k >> shift) & mask
            if d:
                buckets[d - 1] = _j1_add_affine(buckets[d - 1], pt)
        running = _J1_INF
        window_sum = _J1_INF
        for b in reversed(buckets):
            running = _j1_add(running, b)
            window_sum = _j1_add(window_sum, running)
        acc = _j1_add(acc, window_sum)
    return _j1_to_affine(acc)


# --- G2 ---------------------------------------------------------------------

def g2_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    return fp2_sub(fp2_sqr(y), fp2_mul(fp2_sqr(x), x)) == G2_B


def g2_neg(pt):
    if pt is None:
        return None
    return (pt[0], fp2_neg(pt[1]))


def _j2_double(pt):
    X, Y, Z = pt
    if Z == FP2_ZERO or Y == FP2_ZERO:
        return _J2_INF
    A = fp2_sqr(X)
    B = fp2_sqr(Y)
    C = fp2_sqr(B)
    D = fp2_dbl(fp2_sub(fp2_sub(fp2_sqr(fp2_add(X, B)), A), C))
    E = fp2_add(fp2_dbl(A), A)
    X3 = fp2_sub(fp2_sqr(E), fp2_dbl(D))
    Y3 = fp2_sub(fp2_mul(E, fp2_sub(D, X3)), fp2_scale(C, 8))
    Z3 = fp2_dbl(fp2_mul(Y, Z))
    return (X3, Y3, Z3)


def _j2_add(p1, p2):
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    if Z1 == FP2_ZERO:
        return p2
    if Z2 == FP2_ZERO:
        return p1
    Z1Z1 = fp2_sqr(Z1)
    Z2Z2 = fp2_sqr(Z2)
    U1 = fp2_mul(X1, Z2Z2)
    U2 = fp2_mul(X2, Z1Z1)
    S1 = fp2_mul(fp2_mul(Y1, Z2), Z2Z2)
    S2 = fp2_mul(fp2_mul(Y2, Z1), Z1Z1)
    H = fp2_sub(U2, U1)
    rr = fp2_sub(S2, S1)
    if H == FP2_ZERO:
        if rr == FP2_ZERO:
            return _j2_double(p1)
        return _J2_INF
    HH = fp2_sqr(H)
    HHH = fp2_mul(H, HH)
    V = fp2_mul(U1, HH)
    X3 = fp2_sub(fp2_sub(fp2_sqr(rr), HHH), fp2_dbl(V))
    Y3 = fp2_sub(fp2_mul(rr, fp2_sub(V, X3)), fp2_mul(S1, HHH))
    Z3 = fp2_mul(fp2_mul(Z1, Z2), H)
    return (X3, Y3, Z3)


def _j2_to_affine(pt):
    X, Y, Z = pt
    if Z == FP2_ZERO:
        return None
    zi = fp2_inv(Z)
    zi2 = fp2_sqr(zi)
    return (fp2_mul(X, zi2), fp2_mul(fp2_mul(Y, zi2), zi))


def g2_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    one = FP2_ONE
    return _j2_to_affine(_j2_add((a[0], a[1], one), (b[0], b[1], one)))


def g2_mul(pt, k: int, *, reduce: bool = True):
    """Scalar multiplication on the twist.

    ``reduce=False`` keeps the scalar as given; the subgroup check needs
    to multiply by the group order itself.
    """
    if reduce:
        k %= R
    if pt is None or k == 0:
        return None
    if k < 0:
        pt, k = g2_neg(pt), -k
    base = (pt[0], pt[1], FP2_ONE)
    acc = _J2_INF
    for bit in bin(k)[2:]:
        acc = _j2_double(acc)
        if bit == "1":
            acc = _j2_add(acc, base)
    return _j2_to_affine(acc)


def g2_in_subgroup(pt) -> bool:
    return g2_on_curve(pt) and g2_mul(pt, R, reduce=False) is None


def g2_frobenius(pt):
    """The p-power Frobenius endomorphism carried over to the twist."""
    x, y = pt
    return (fp2_mul(fp2_conj(x), FROB1[2]), fp2_mul(fp2_conj(y), FROB1[3]))


def g2_neg_frobenius2(pt):
    """-pi^2(Q) on the twist; the y-coefficient xi^((p^2-1)/2) is -1."""
    x, y = pt
    return (fp2_scale(x, FROB2[2]), y)


__all__ = [
    "G1_B",
    "G2_B",
    "G1_GEN",
    "G2_GEN",
    "G1FixedBase",
    "fp2_mul_xi",
    "g1_add",
    "g1_double",
    "g1_msm",
    "g1_mul",
    "g1_neg",
    "g1_on_curve",
    "g2_add",
    "g2_frobenius",
    "g2_in_subgroup",
    "g2_mul",
    "g2_neg",
    "g2_neg_frobenius2",
    "g2_on_curve",
]
