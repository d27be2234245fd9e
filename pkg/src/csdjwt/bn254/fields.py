"""Tower arithmetic for the BN254 (alt_bn128) pairing.

Fp2  = Fp[i] / (i^2 + 1)
Fp6  = Fp2[v] / (v^3 - xi),  xi = 9 + i
Fp12 = Fp6[w] / (w^2 - v)

Elements are plain tuples of Python ints: Fp2 is ``(c0, c1)``, Fp6 is a
3-tuple of Fp2 and Fp12 a 2-tuple of Fp6. Every operation returns fully
reduced coordinates so tuples compare with ``==``.
"""

from __future__ import annotations

P = 21888242871839275222246405745257275088696311157297823662689037894645226208583
R = 21888242871839275222246405745257275088548364400416034343698204186575808495617
# curve parameter u; P = 36u^4 + 36u^3 + 24u^2 + 6u + 1
U = 4965661367192848881

FP2_ZERO = (0, 0)
FP2_ONE = (1, 0)
FP6_ZERO = (FP2_ZERO, FP2_ZERO, FP2_ZERO)
FP6_ONE = (FP2_ONE, FP2_ZERO, FP2_ZERO)
FP12_ONE = (FP6_ONE, FP6_ZERO)


# --- Fp ---------------------------------------------------------------------

def fp_inv(a: int) -> int:
    if a % P == 0:
        raise ZeroDivisionError("inverse of zero in Fp")
    return pow(a, -1, P)


def fp_sqrt(a: int) -> int | None:
    """Square root in Fp (P = 3 mod 4), or None for non-residues."""
    a %= P
    x = pow(a, (P + 1) // 4, P)
    return x if x * x % P == a else None


# --- Fp2 --------------------------------------------------------------------

def fp2_add(a, b):
    return ((a[0] + b[0]) % P, (a[1] + b[1]) % P)


def fp2_sub(a, b):
    return ((a[0] - b[0]) % P, (a[1] - b[1]) % P)


def fp2_neg(a):
    return ((-a[0]) % P, (-a[1]) % P)


def fp2_dbl(a):
    return ((a[0] << 1) % P, (a[1] << 1) % P)


def fp2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % P, ((a0 + a1) * (b0 + b1) - t0 - t1) % P)


def fp2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % P, (a0 * a1 << 1) % P)


def fp2_scale(a, k: int):
    return (a[0] * k % P, a[1] * k % P)


def fp2_mul_xi(a):
    a0, a1 = a
    return ((9 * a0 - a1) % P, (a0 + 9 * a1) % P)


def fp2_conj(a):
    return (a[0], (-a[1]) % P)


def fp2_inv(a):
    a0, a1 = a
    t = fp_inv(a0 * a0 + a1 * a1)
    return (a0 * t % P, (-a1 * t) % P)


def fp2_pow(a, e: int):
    result = FP2_ONE
    base = a
    while e:
        if e & 1:
            result = fp2_mul(result, base)
        base = fp2_sqr(base)
        e >>= 1
    return result


def fp2_sqrt(a):
    """Square root in Fp2 via the norm, or None if ``a`` is a non-residue."""
    a0, a1 = a
    if a1 == 0:
        s = fp_sqrt(a0)
        if s is not None:
            return (s, 0)
        # a0 is a non-residue in Fp, so sqrt(a0) = sqrt(-a0) * i
        s = fp_sqrt(-a0)
        return None if s is None else (0, s)
    n = fp_sqrt(a0 * a0 + a1 * a1)
    if n is None:
        return None
    half = fp_inv(2)
    x0 = fp_sqrt((a0 + n) * half)
    if x0 is None:
        x0 = fp_sqrt((a0 - n) * half)
        if x0 is None:
            return None
    x1 = a1 * fp_inv(2 * x0) % P
    root = (x0, x1)
    return root if fp2_sqr(root) == (a0 % P, a1 % P) else None


def fp2_is_larger(a) -> bool:
    """Lexicographic sign used by point compression (imaginary part first)."""
    half = (P - 1) // 2
    if a[1]:
        return a[1] > half
    return a[0] > half


# --- Fp6 --------------------------------------------------------------------

def fp6_add(a, b):
    return (fp2_add(a[0], b[0]), fp2_add(a[1], b[1]), fp2_add(a[2], b[2]))


def fp6_sub(a, b):
    return (fp2_sub(a[0], b[0]), fp2_sub(a[1], b[1]), fp2_sub(a[2], b[2]))


def fp6_neg(a):
    return (fp2_neg(a[0]), fp2_neg(a[1]), fp2_neg(a[2]))


def fp6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = fp2_mul(a0, b0)
    t1 = fp2_mul(a1, b1)
    t2 = fp2_mul(a2, b2)
    c0 = fp2_add(t0, fp2_mul_xi(fp2_sub(fp2_sub(fp2_mul(fp2_add(a1, a2), fp2_add(b1, b2)), t1), t2)))
    c1 = fp2_add(fp2_sub(fp2_sub(fp2_mul(fp2_add(a0, a1), fp2_add(b0, b1)), t0), t1), fp2_mul_xi(t2))
    c2 = fp2_add(fp2_sub(fp2_sub(fp2_mul(fp2_add(a0, a2), fp2_add(b0, b2)), t0), t2), t1)
    return (c0, c1, c2)


def fp6_sqr(a):
    a0, a1, a2 = a
    s0 = fp2_sqr(a0)
    s1 = fp2_dbl(fp2_mul(a0, a1))
    s2 = fp2_sqr(fp2_add(fp2_sub(a0, a1), a2))
    s3 = fp2_dbl(fp2_mul(a1, a2))
    s4 = fp2_sqr(a2)
    c0 = fp2_add(s0, fp2_mul_xi(s3))
    c1 = fp2_add(s1, fp2_mul_xi(s4))
    c2 = fp2_sub(fp2_sub(fp2_add(fp2_add(s1, s2), s3), s0), s4)
    return (c0, c1, c2)


def fp6_mul_by_v(a):
    return (fp2_mul_xi(a[2]), a[0], a[1])


def fp6_scale(a, k: int):
    return (fp2_scale(a[0], k), fp2_scale(a[1], k), fp2_scale(a[2], k))


def fp6_mul_by_01(a, b0, b1):
    """Multiply by the sparse element ``b0 + b1 v``."""
    a0, a1, a2 = a
    t0 = fp2_mul(a0, b0)
    t1 = fp2_mul(a1, b1)
    c0 = fp2_add(t0, fp2_mul_xi(fp2_mul(a2, b1)))
    c1 = fp2_sub(fp2_sub(fp2_mul(fp2_add(a0, a1), fp2_add(b0, b1)), t0), t1)
    c2 = fp2_add(t1, fp2_mul(a2, b0))
    return (c0, c1, c2)


def fp6_inv(a):
    a0, a1, a2 = a
    c0 = fp2_sub(fp2_sqr(a0), fp2_mul_xi(fp2_mul(a1, a2)))
    c1 = fp2_sub(fp2_mul_xi(fp2_sqr(a2)), fp2_mul(a0, a1))
    c2 = fp2_sub(fp2_sqr(a1), fp2_mul(a0, a2))
    t = fp2_add(fp2_mul(a0, c0), fp2_mul_xi(fp2_add(fp2_mul(a2, c1), fp2_mul(a1, c2))))
    t = fp2_inv(t)
    return (fp2_mul(c0, t), fp2_mul(c1, t), fp2_mul(c2, t))


# --- Fp12 -------------------------------------------------------------------

def fp12_mul(x, y):
    a, b = x
    c, d = y
    t0 = fp6_mul(a, c)
    t1 = fp6_mul(b, d)
    c1 = fp6_sub(fp6_sub(fp6_mul(fp6_add(a, b), fp6_add(c, d)), t0), t1)
    return (fp6_add(t0, fp6_mul_by_v(t1)), c1)


def fp12_sqr(x):
    a, b = x
    ab = fp6_mul(a, b)
    c0 = fp6_mul(fp6_add(a, b), fp6_add(a, fp6_mul_by_v(b)))
    c0 = fp6_sub(fp6_sub(c0, ab), fp6_mul_by_v(ab))
    return (c0, fp6_add(ab, ab))


def fp12_conj(x):
    return (x[0], fp6_neg(x[1]))


def fp12_inv(x):
    a, b = x
    t = fp6_inv(fp6_sub(fp6_sqr(a), fp6_mul_by_v(fp6_sqr(b))))
    return (fp6_mul(a, t), fp6_neg(fp6_mul(b, t)))


def fp12_mul_by_line(f, y_p: int, b0, b1):
    """Multiply ``f`` by the sparse line value ``y_p + (b0 + b1 v) w``."""
    f0, f1 = f
    t0 = fp6_scale(f0, y_p)
    t1 = fp6_mul_by_01(f1, b0, b1)
    s = fp6_mul_by_01(fp6_add(f0, f1), ((b0[0] + y_p) % P, b0[1]), b1)
    return (fp6_add(t0, fp6_mul_by_v(t1)), fp6_sub(fp6_sub(s, t0), t1))


def fp12_pow(x, e: int):
    if e < 0:
        return fp12_pow(fp12_inv(x), -e)
    result = FP12_ONE
    base = x
    while e:
        if e & 1:
            result = fp12_mul(result, base)
        base = fp12_sqr(base)
        e >>= 1
    return result


def fp12_cyclotomic_sqr(x):
    """Granger-Scott squaring, valid only inside the cyclotomic subgroup."""
    (r0, r4, r3), (r2, r1, r5) = x

    tmp = fp2_mul(r0, r1)
    t0 = fp2_sub(fp2_sub(fp2_mul(fp2_add(r0, r1), fp2_add(fp2_mul_xi(r1), r0)), tmp), fp2_mul_xi(tmp))
    t1 = fp2_dbl(tmp)
    tmp = fp2_mul(r2, r3)
    t2 = fp2_sub(fp2_sub(fp2_mul(fp2_add(r2, r3), fp2_add(fp2_mul_xi(r3), r2)), tmp), fp2_mul_xi(tmp))
    t3 = fp2_dbl(tmp)
    tmp = fp2_mul(r4, r5)
    t4 = fp2_sub(fp2_sub(fp2_mul(fp2_add(r4, r5), fp2_add(fp2_mul_xi(r5), r4)), tmp), fp2_mul_xi(tmp))
    t5 = fp2_dbl(tmp)

    z0 = fp2_add(fp2_dbl(fp2_sub(t0, r0)), t0)
    z1 = fp2_add(fp2_dbl(fp2_add(t1, r1)), t1)
    xt5 = fp2_mul_xi(t5)
    z2 = fp2_add(fp2_dbl(fp2_add(r2, xt5)), xt5)
    z3 = fp2_add(fp2_dbl(fp2_sub(t4, r3)), t4)
    z4 = fp2_add(fp2_dbl(fp2_sub(t2, r4)), t2)
    z5 = fp2_add(fp2_dbl(fp2_add(r5, t3)), t3)
    return ((z0, z4, z3), (z2, z1, z5))


def _naf(e: int) -> list[int]:
    digits = []
    while e:
        if e & 1:
            d = 2 - (e & 3)
            e -= d
        else:
            d = 0
        digits.append(d)
        e >>= 1
    return digits


_U_NAF = _naf(U)


def fp12_cyclotomic_pow_u(x):
    """x^U for x in the cyclotomic subgroup (inverse is conjugation there)."""
    x_inv = fp12_conj(x)
    result = FP12_ONE
    for d in reversed(_U_NAF):
        result = fp12_cyclotomic_sqr(result)
        if d == 1:
            result = fp12_mul(result, x)
        elif d == -1:
            result = fp12_mul(result, x_inv)
    return result


# Frobenius coefficients: xi^(e(P-1)/6) and xi^(e(P^2-1)/6), e = 0..5
_XI = (9, 1)
FROB1 = tuple(fp2_pow(_XI, e * (P - 1) // 6) for e in range(6))
FROB2 = tuple(fp2_pow(_XI, e * (P * P - 1) // 6)[0] for e in range(6))


def fp12_frobenius(x):
    (a0, a1, a2), (b0, b1, b2) = x
    c = fp2_conj
    g = FROB1
    return (
        (c(a0), fp2_mul(c(a1), g[2]), fp2_mul(c(a2), g[4])),
        (fp2_mul(c(b0), g[1]), fp2_mul(c(b1), g[3]), fp2_mul(c(b2), g[5])),
    )


def fp12_frobenius2(x):
    (a0, a1, a2), (b0, b1, b2) = x
    g = FROB2
    return (
        (a0, fp2_scale(a1, g[2]), fp2_scale(a2, g[4])),
        (fp2_scale(b0, g[1]), fp2_scale(b1, g[3]), fp2_scale(b2, g[5])),
    )


def fp12_to_coeffs(x) -> list[int]:
    """Coefficients over Fp in the basis 1, w, ..., w^11 with w^12 = 18 w^6 - 82.

    This is the flat representation used by py_ecc; it exists so tests can
    compare pairing values against that independent implementation.
    """
    (a0, a1, a2), (b0, b1, b2) = x
    coeffs = [0] * 12
    # coefficient of w^e is an Fp2 element c0 + c1 i, and i = w^6 - 9
    for e, (c0, c1) in ((0, a0), (2, a1), (4, a2), (1, b0), (3, b1), (5, b2)):
        coeffs[e] = (coeffs[e] + c0 - 9 * c1) % P
        coeffs[e + 6] = (coeffs[e + 6] + c1) % P
    return coeffs
