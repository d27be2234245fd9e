"""Optimal ate pairing on BN254.

G2 arguments are turned into a list of affine line coefficients once
(:class:`G2Prepared`); evaluating the Miller loop at a G1 point then costs
only sparse multiplications. Products of pairings share one loop and one
final exponentiation.
"""

from __future__ import annotations

from functools import lru_cache

from .curve import g2_frobenius, g2_neg_frobenius2, g2_on_curve
from .fields import (
    FP12_ONE,
    P,
    U,
    fp12_conj,
    fp12_cyclotomic_pow_u,
    fp12_cyclotomic_sqr,
    fp12_frobenius,
    fp12_frobenius2,
    fp12_inv,
    fp12_mul,
    fp12_mul_by_line,
    fp12_sqr,
    fp2_add,
    fp2_dbl,
    fp2_inv,
    fp2_mul,
    fp2_neg,
    fp2_scale,
    fp2_sqr,
    fp2_sub,
)

ATE_LOOP = 6 * U + 2
_ATE_BITS = [int(b) for b in bin(ATE_LOOP)[3:]]


def _line_double(T):
    x, y = T
    lam = fp2_mul(fp2_scale(fp2_sqr(x), 3), fp2_inv(fp2_dbl(y)))
    x3 = fp2_sub(fp2_sqr(lam), fp2_dbl(x))
    y3 = fp2_sub(fp2_mul(lam, fp2_sub(x, x3)), y)
    return (lam, fp2_sub(fp2_mul(lam, x), y)), (x3, y3)


def _line_add(T, Q):
    x1, y1 = T
    x2, y2 = Q
    lam = fp2_mul(fp2_sub(y2, y1), fp2_inv(fp2_sub(x2, x1)))
    x3 = fp2_sub(fp2_sub(fp2_sqr(lam), x1), x2)
    y3 = fp2_sub(fp2_mul(lam, fp2_sub(x1, x3)), y1)
    return (lam, fp2_sub(fp2_mul(lam, x1), y1)), (x3, y3)


class G2Prepared:
    """Line coefficients of the Miller loop for a fixed G2 point.

    Each entry is ``(lam, c)``; at ``(xp, yp)`` the line evaluates to
    ``yp + (-lam * xp + c v) w``.
    """

    __slots__ = ("point", "doubles", "adds", "tail")

    def __init__(self, Q):
        if Q is None:
            raise ValueError("cannot prepare the identity")
        if not g2_on_curve(Q):
            raise ValueError("point is not on the twist")
        self.point = Q
        self.doubles = []
        self.adds = []
        T = Q
        for bit in _ATE_BITS:
            line, T = _line_double(T)
            self.doubles.append(line)
            if bit:
                line, T = _line_add(T, Q)
                self.adds.append(line)
        q1 = g2_frobenius(Q)
        q2 = g2_neg_frobenius2(Q)
        l1, T = _line_add(T, q1)
        l2, _ = _line_add(T, q2)
        self.tail = (l1, l2)


@lru_cache(maxsize=64)
def prepare_g2(Q) -> G2Prepared:
    """Cached :class:`G2Prepared`; public keys are verified over and over."""
    return G2Prepared(Q)


def miller_loop(pairs):
    """Product of Miller functions for ``[(g1_point, G2Prepared), ...]``.

    Pairs whose G1 point is the identity contribute 1 and are skipped.
    """
    pairs = [(p, q) for p, q in pairs if p is not None]
    if not pairs:
        return FP12_ONE
    evals = [((-p[0]) % P, p[1], q) for p, q in pairs]
    f = FP12_ONE
    add_idx = 0
    for i, bit in enumerate(_ATE_BITS):
        f = fp12_sqr(f)
        for nx, yp, q in evals:
            lam, c = q.doubles[i]
            f = fp12_mul_by_line(f, yp, fp2_scale(lam, nx), c)
        if bit:
            for nx, yp, q in evals:
                lam, c = q.adds[add_idx]
                f = fp12_mul_by_line(f, yp, fp2_scale(lam, nx), c)
            add_idx += 1
    for nx, yp, q in evals:
        for lam, c in q.tail:
            f = fp12_mul_by_line(f, yp, fp2_scale(lam, nx), c)
    return f


def _cpow(x, n: int):
    """x^n for small positive n inside the cyclotomic subgroup."""
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else fp12_mul(result, base)
        n >>= 1
        if n:
            base = fp12_cyclotomic_sqr(base)
    return result


def final_exponentiation(f):
    """f^((p^12 - 1) / r)."""
    # easy part: (p^6 - 1)(p^2 + 1)
    f = fp12_mul(fp12_conj(f), fp12_inv(f))
    f = fp12_mul(fp12_frobenius2(f), f)
    # hard part (p^4 - p^2 + 1) / r written in base p:
    # l3 = 1, l2 = 6u^2 + 1, l1 = -36u^3 - 18u^2 - 12u + 1,
    # l0 = -36u^3 - 30u^2 - 18u - 2
    a = fp12_cyclotomic_pow_u(f)
    b = fp12_cyclotomic_pow_u(a)
    c = fp12_cyclotomic_pow_u(b)
    c36 = _cpow(c, 36)
    b6 = _cpow(b, 6)
    b18 = _cpow(b6, 3)
    b30 = fp12_mul(b18, fp12_cyclotomic_sqr(b6))
    a6 = _cpow(a, 6)
    a12 = fp12_cyclotomic_sqr(a6)
    a18 = fp12_mul(a12, a6)
    y0 = fp12_conj(fp12_mul(fp12_mul(c36, b30), fp12_mul(a18, fp12_cyclotomic_sqr(f))))
    y1 = fp12_mul(fp12_conj(fp12_mul(fp12_mul(c36, b18), a12)), f)
    y2 = fp12_mul(b6, f)
    # y0 * y1^p * y2^(p^2) * f^(p^3)
    t = fp12_mul(fp12_frobenius(f), y2)
    t = fp12_mul(fp12_frobenius(t), y1)
    t = fp12_mul(fp12_frobenius(t), y0)
    return t


def pairing(p1, q2):
    """e(p1, q2) for affine p1 in G1 and q2 in G2."""
    if p1 is None or q2 is None:
        return FP12_ONE
    return final_exponentiation(miller_loop([(p1, prepare_g2(q2))]))


def pairing_product_is_one(pairs) -> bool:
    """True iff prod e(P_i, Q_i) == 1; ``Q_i`` may be points or prepared."""
    prepared = []
    for p1, q2 in pairs:
        if q2 is None:
            continue
        if not isinstance(q2, G2Prepared):
            q2 = prepare_g2(q2)
        prepared.append((p1, q2))
    return final_exponentiation(miller_loop(prepared)) == FP12_ONE


__all__ = [
    "ATE_LOOP",
    "G2Prepared",
    "final_exponentiation",
    "miller_loop",
    "pairing",
    "pairing_product_is_one",
    "prepare_g2",
]
