"""Pure-Python Barreto-Naehrig pairing backend (254-bit, the alt_bn128 curve).

Provides the three groups used by the rest of the package: G1 = E(Fq) with
E: y^2 = x^3 + 3, G2 = the order-r subgroup of the sextic twist
E': y^2 = x^3 + 3/(9+i) over Fq2, and GT = the order-r subgroup of Fq12*,
together with the optimal ate pairing e: G1 x G2 -> GT (Type-3, bilinear,
non-degenerate).

Representation conventions: Fq elements are gmpy2 integers, Fq2 elements are
pairs (a0, a1) meaning a0 + a1*i with i^2 = -1, Fq6 elements are triples of
Fq2 over v^3 = 9 + i, Fq12 elements are pairs of Fq6 over w^2 = v.  Points
are affine coordinate pairs; None is the point at infinity.

Arithmetic is pure Python over gmpy2 and is not constant time; callers accept
that trade-off in exchange for having no native pairing dependency.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from gmpy2 import invert, mpz, powmod

# BN parameter z and the derived field characteristic q and group order r.
Z_BN = mpz(4965661367192848881)
Q = 36 * Z_BN**4 + 36 * Z_BN**3 + 24 * Z_BN**2 + 6 * Z_BN + 1
R = 36 * Z_BN**4 + 36 * Z_BN**3 + 18 * Z_BN**2 + 6 * Z_BN + 1

assert Q == 21888242871839275222246405745257275088696311157297823662689037894645226208583
assert R == 21888242871839275222246405745257275088548364400416034343698204186575808495617

B_G1 = mpz(3)

Fq2 = Tuple[mpz, mpz]
Fq6 = Tuple[Fq2, Fq2, Fq2]
Fq12 = Tuple[Fq6, Fq6]
G1Point = Optional[Tuple[mpz, mpz]]
G2Point = Optional[Tuple[Fq2, Fq2]]

FQ2_ZERO: Fq2 = (mpz(0), mpz(0))
FQ2_ONE: Fq2 = (mpz(1), mpz(0))
XI: Fq2 = (mpz(9), mpz(1))


# ---------------------------------------------------------------------------
# Fq2 arithmetic


def fq2_add(a: Fq2, b: Fq2) -> Fq2:
    return ((a[0] + b[0]) % Q, (a[1] + b[1]) % Q)


def fq2_sub(a: Fq2, b: Fq2) -> Fq2:
    return ((a[0] - b[0]) % Q, (a[1] - b[1]) % Q)


def fq2_neg(a: Fq2) -> Fq2:
    return (-a[0] % Q, -a[1] % Q)


def fq2_conj(a: Fq2) -> Fq2:
    return (a[0], -a[1] % Q)


def fq2_mul(a: Fq2, b: Fq2) -> Fq2:
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % Q, ((a0 + a1) * (b0 + b1) - t0 - t1) % Q)


def fq2_sq(a: Fq2) -> Fq2:
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % Q, 2 * a0 * a1 % Q)


def fq2_smul(a: Fq2, s) -> Fq2:
    """Multiply by an Fq scalar."""
    return (a[0] * s % Q, a[1] * s % Q)


def fq2_mul_xi(a: Fq2) -> Fq2:
    """Multiply by the cubic nonresidue xi = 9 + i."""
    a0, a1 = a
    return ((9 * a0 - a1) % Q, (a0 + 9 * a1) % Q)


def fq2_inv(a: Fq2) -> Fq2:
    a0, a1 = a
    d = invert(a0 * a0 + a1 * a1, Q)
    return (a0 * d % Q, -a1 * d % Q)


def fq2_pow(a: Fq2, e) -> Fq2:
    result = FQ2_ONE
    base = a
    e = mpz(e)
    while e > 0:
        if e & 1:
            result = fq2_mul(result, base)
        base = fq2_sq(base)
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# Fq6 arithmetic (coefficients over v with v^3 = xi)


FQ6_ZERO: Fq6 = (FQ2_ZERO, FQ2_ZERO, FQ2_ZERO)
FQ6_ONE: Fq6 = (FQ2_ONE, FQ2_ZERO, FQ2_ZERO)


def fq6_add(a: Fq6, b: Fq6) -> Fq6:
    return (fq2_add(a[0], b[0]), fq2_add(a[1], b[1]), fq2_add(a[2], b[2]))


def fq6_sub(a: Fq6, b: Fq6) -> Fq6:
    return (fq2_sub(a[0], b[0]), fq2_sub(a[1], b[1]), fq2_sub(a[2], b[2]))


def fq6_neg(a: Fq6) -> Fq6:
    return (fq2_neg(a[0]), fq2_neg(a[1]), fq2_neg(a[2]))


def fq6_mul(a: Fq6, b: Fq6) -> Fq6:
    # Karatsuba over the three Fq2 coefficients, flattened to integer ops with
    # a single reduction per output coordinate (intermediates stay small).
    (a00, a01), (a10, a11), (a20, a21) = a
    (b00, b01), (b10, b11), (b20, b21) = b
    t0 = a00 * b00
    t1 = a01 * b01
    v00 = t0 - t1
    v01 = (a00 + a01) * (b00 + b01) - t0 - t1
    t0 = a10 * b10
    t1 = a11 * b11
    v10 = t0 - t1
    v11 = (a10 + a11) * (b10 + b11) - t0 - t1
    t0 = a20 * b20
    t1 = a21 * b21
    v20 = t0 - t1
    v21 = (a20 + a21) * (b20 + b21) - t0 - t1
    s0 = a10 + a20
    s1 = a11 + a21
    u0 = b10 + b20
    u1 = b11 + b21
    t0 = s0 * u0
    t1 = s1 * u1
    m0 = t0 - t1 - v10 - v20
    m1 = (s0 + s1) * (u0 + u1) - t0 - t1 - v11 - v21
    c00 = (v00 + 9 * m0 - m1) % Q
    c01 = (v01 + m0 + 9 * m1) % Q
    s0 = a00 + a10
    s1 = a01 + a11
    u0 = b00 + b10
    u1 = b01 + b11
    t0 = s0 * u0
    t1 = s1 * u1
    m0 = t0 - t1 - v00 - v10
    m1 = (s0 + s1) * (u0 + u1) - t0 - t1 - v01 - v11
    c10 = (m0 + 9 * v20 - v21) % Q
    c11 = (m1 + v20 + 9 * v21) % Q
    s0 = a00 + a20
    s1 = a01 + a21
    u0 = b00 + b20
    u1 = b01 + b21
    t0 = s0 * u0
    t1 = s1 * u1
    m0 = t0 - t1 - v00 - v20
    m1 = (s0 + s1) * (u0 + u1) - t0 - t1 - v01 - v21
    c20 = (m0 + v10) % Q
    c21 = (m1 + v11) % Q
    return ((c00, c01), (c10, c11), (c20, c21))


def fq6_sq(a: Fq6) -> Fq6:
    return fq6_mul(a, a)


def fq6_mul_v(a: Fq6) -> Fq6:
    """Multiply by v (shifts coefficients, wrapping through xi)."""
    return (fq2_mul_xi(a[2]), a[0], a[1])


def fq6_smul_fq(a: Fq6, s) -> Fq6:
    return (fq2_smul(a[0], s), fq2_smul(a[1], s), fq2_smul(a[2], s))


def fq6_inv(a: Fq6) -> Fq6:
    a0, a1, a2 = a
    c0 = fq2_sub(fq2_sq(a0), fq2_mul_xi(fq2_mul(a1, a2)))
    c1 = fq2_sub(fq2_mul_xi(fq2_sq(a2)), fq2_mul(a0, a1))
    c2 = fq2_sub(fq2_sq(a1), fq2_mul(a0, a2))
    t = fq2_add(fq2_mul(a0, c0), fq2_mul_xi(fq2_add(fq2_mul(a2, c1), fq2_mul(a1, c2))))
    ti = fq2_inv(t)
    return (fq2_mul(c0, ti), fq2_mul(c1, ti), fq2_mul(c2, ti))


# ---------------------------------------------------------------------------
# Fq12 arithmetic (a + b*w with w^2 = v)


FQ12_ONE: Fq12 = (FQ6_ONE, FQ6_ZERO)


def fq12_mul(a: Fq12, b: Fq12) -> Fq12:
    a0, a1 = a
    b0, b1 = b
    t0 = fq6_mul(a0, b0)
    t1 = fq6_mul(a1, b1)
    sa = tuple((x + y, u + v) for (x, u), (y, v) in zip(a0, a1))
    sb = tuple((x + y, u + v) for (x, u), (y, v) in zip(b0, b1))
    m = fq6_mul(sa, sb)
    (t00, t01), (t02, t03), (t04, t05) = t0
    (t10, t11), (t12, t13), (t14, t15) = t1
    c0 = (
        ((t00 + 9 * t14 - t15) % Q, (t01 + t14 + 9 * t15) % Q),
        ((t02 + t10) % Q, (t03 + t11) % Q),
        ((t04 + t12) % Q, (t05 + t13) % Q),
    )
    c1 = tuple(
        ((x - y - z) % Q, (u - v - w) % Q)
        for (x, u), (y, v), (z, w) in zip(m, t0, t1)
    )
    return (c0, c1)


def fq12_sq(a: Fq12) -> Fq12:
    a0, a1 = a
    (p0, p1), (p2, p3), (p4, p5) = a0
    (q0, q1), (q2, q3), (q4, q5) = a1
    t = fq6_mul(a0, a1)
    (t0, t1), (t2, t3), (t4, t5) = t
    s = ((p0 + q0, p1 + q1), (p2 + q2, p3 + q3), (p4 + q4, p5 + q5))
    u = ((p0 + 9 * q4 - q5, p1 + q4 + 9 * q5), (p2 + q0, p3 + q1), (p4 + q2, p5 + q3))
    m = fq6_mul(s, u)
    c0 = (
        ((m[0][0] - t0 - 9 * t4 + t5) % Q, (m[0][1] - t1 - t4 - 9 * t5) % Q),
        ((m[1][0] - t2 - t0) % Q, (m[1][1] - t3 - t1) % Q),
        ((m[2][0] - t4 - t2) % Q, (m[2][1] - t5 - t3) % Q),
    )
    c1 = ((2 * t0 % Q, 2 * t1 % Q), (2 * t2 % Q, 2 * t3 % Q), (2 * t4 % Q, 2 * t5 % Q))
    return (c0, c1)


def fq12_conj(a: Fq12) -> Fq12:
    """Conjugation over Fq6; inverts elements of the cyclotomic subgroup."""
    return (a[0], fq6_neg(a[1]))


def fq12_inv(a: Fq12) -> Fq12:
    a0, a1 = a
    t = fq6_inv(fq6_sub(fq6_sq(a0), fq6_mul_v(fq6_sq(a1))))
    return (fq6_mul(a0, t), fq6_neg(fq6_mul(a1, t)))


def _fq12_coeffs(a: Fq12) -> List[Fq2]:
    """Coefficients ordered by ascending power of w."""
    (c0, c1, c2), (d0, d1, d2) = a
    return [c0, d0, c1, d1, c2, d2]


def _fq12_from_coeffs(coeffs: Sequence[Fq2]) -> Fq12:
    c0, d0, c1, d1, c2, d2 = coeffs
    return ((c0, c1, c2), (d0, d1, d2))


# Frobenius coefficients: w^q = xi^((q-1)/6) * w.
_FROB_W: List[Fq2] = [FQ2_ONE] + [fq2_pow(XI, k * (Q - 1) // 6) for k in range(1, 6)]


def fq12_frob(a: Fq12) -> Fq12:
    coeffs = _fq12_coeffs(a)
    out = [fq2_mul(fq2_conj(c), _FROB_W[k]) for k, c in enumerate(coeffs)]
    return _fq12_from_coeffs(out)


# ---------------------------------------------------------------------------
# G1: short Weierstrass y^2 = x^3 + 3 over Fq, cofactor 1


G1_GEN: G1Point = (mpz(1), mpz(2))


def g1_is_on_curve(p: G1Point) -> bool:
    if p is None:
        return True
    x, y = p
    if not (0 <= x < Q and 0 <= y < Q):
        return False
    return (y * y - x * x * x - B_G1) % Q == 0


def g1_neg(p: G1Point) -> G1Point:
    if p is None:
        return None
    return (p[0], -p[1] % Q)


def g1_add(p: G1Point, q: G1Point) -> G1Point:
    if p is None:
        return q
    if q is None:
        return p
    x1, y1 = p
    x2, y2 = q
    if x1 == x2:
        if (y1 + y2) % Q == 0:
            return None
        lam = 3 * x1 * x1 * invert(2 * y1, Q) % Q
    else:
        lam = (y2 - y1) * invert(x2 - x1, Q) % Q
    x3 = (lam * lam - x1 - x2) % Q
    y3 = (lam * (x1 - x3) - y1) % Q
    return (x3, y3)


def _jac_dbl(p):
    x1, y1, z1 = p
    a = x1 * x1 % Q
    b = y1 * y1 % Q
    c = b * b % Q
    d = 2 * ((x1 + b) * (x1 + b) - a - c) % Q
    e = 3 * a % Q
    f = e * e % Q
    x3 = (f - 2 * d) % Q
    y3 = (e * (d - x3) - 8 * c) % Q
    z3 = 2 * y1 * z1 % Q
    return (x3, y3, z3)


def _jac_add(p, q):
    x1, y1, z1 = p
    x2, y2, z2 = q
    if z1 == 0:
        return q
    if z2 == 0:
        return p
    z1s = z1 * z1 % Q
    z2s = z2 * z2 % Q
    u1 = x1 * z2s % Q
    u2 = x2 * z1s % Q
    s1 = y1 * z2s * z2 % Q
    s2 = y2 * z1s * z1 % Q
    h = (u2 - u1) % Q
    rr = (s2 - s1) % Q
    if h == 0:
        if rr == 0:
            return _jac_dbl(p)
        return (mpz(1), mpz(1), mpz(0))
    h2 = h * h % Q
    h3 = h2 * h % Q
    u1h2 = u1 * h2 % Q
    x3 = (rr * rr - h3 - 2 * u1h2) % Q
    y3 = (rr * (u1h2 - x3) - s1 * h3) % Q
    z3 = z1 * z2 * h % Q
    return (x3, y3, z3)


def _naf(k: int, width: int = 4) -> List[int]:
    """Signed digits, least significant first; nonzero digits are odd."""
    digits = []
    full = 1 << width
    half = full >> 1
    k = int(k)
    while k:
        if k & 1:
            d = k % full
            if d >= half:
                d -= full
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits


def g1_mul(p: G1Point, k) -> G1Point:
    k = mpz(k) % R
    if p is None or k == 0:
        return None
    x, y = p
    base = (x, y, mpz(1))
    table = [base]
    dbl = _jac_dbl(base)
    for _ in range(3):
        table.append(_jac_add(table[-1], dbl))
    acc = (mpz(1), mpz(1), mpz(0))
    for d in reversed(_naf(k)):
        acc = _jac_dbl(acc)
        if d > 0:
            acc = _jac_add(acc, table[d >> 1])
        elif d < 0:
            tx, ty, tz = table[(-d) >> 1]
            acc = _jac_add(acc, (tx, -ty % Q, tz))
    x3, y3, z3 = acc
    if z3 == 0:
        return None
    zi = invert(z3, Q)
    zi2 = zi * zi % Q
    return (x3 * zi2 % Q, y3 * zi2 * zi % Q)


def g1_mul_raw(p: G1Point, k: int) -> G1Point:
    """Scalar multiplication without reducing k mod r (for order checks)."""
    if p is None or k == 0:
        return None
    if k < 0:
        return g1_mul_raw(g1_neg(p), -k)
    acc = None
    for bit in bin(k)[2:]:
        acc = g1_add(acc, acc)
        if bit == "1":
            acc = g1_add(acc, p)
    return acc


def sqrt_fq(a) -> Optional[mpz]:
    """Square root mod q (q = 3 mod 4), or None when a is not a square."""
    a = mpz(a) % Q
    root = powmod(a, (Q + 1) // 4, Q)
    if root * root % Q != a:
        return None
    return root


def g1_from_x(x, parity: int) -> G1Point:
    """Lift an x-coordinate to the curve point whose y has the given parity."""
    x = mpz(x)
    y = sqrt_fq((x * x * x + B_G1) % Q)
    if y is None:
        return None
    if int(y & 1) != parity:
        y = -y % Q
    return (x, y)


# ---------------------------------------------------------------------------
# G2: order-r subgroup of the sextic twist over Fq2


TWIST_B: Fq2 = fq2_smul(fq2_inv(XI), 3)

G2_GEN: G2Point = (
    (
        mpz(10857046999023057135944570762232829481370756359578518086990519993285655852781),
        mpz(11559732032986387107991004021392285783925812861821192530917403151452391805634),
    ),
    (
        mpz(8495653923123431417604973247489272438418190587263600148770280649306958101930),
        mpz(4082367875863433681332203403145435568316851327593401208105741076214120093531),
    ),
)


def g2_is_on_curve(p: G2Point) -> bool:
    if p is None:
        return True
    x, y = p
    for c in (*x, *y):
        if not 0 <= c < Q:
            return False
    lhs = fq2_sq(y)
    rhs = fq2_add(fq2_mul(fq2_sq(x), x), TWIST_B)
    return lhs == rhs


def g2_neg(p: G2Point) -> G2Point:
    if p is None:
        return None
    return (p[0], fq2_neg(p[1]))


def g2_add(p: G2Point, q: G2Point) -> G2Point:
    if p is None:
        return q
    if q is None:
        return p
    x1, y1 = p
    x2, y2 = q
    if x1 == x2:
        if fq2_add(y1, y2) == FQ2_ZERO:
            return None
        lam = fq2_mul(fq2_smul(fq2_sq(x1), 3), fq2_inv(fq2_smul(y1, 2)))
    else:
        lam = fq2_mul(fq2_sub(y2, y1), fq2_inv(fq2_sub(x2, x1)))
    x3 = fq2_sub(fq2_sub(fq2_sq(lam), x1), x2)
    y3 = fq2_sub(fq2_mul(lam, fq2_sub(x1, x3)), y1)
    return (x3, y3)


def g2_mul(p: G2Point, k) -> G2Point:
    k = mpz(k) % R
    if p is None or k == 0:
        return None
    acc = None
    neg = g2_neg(p)
    for d in reversed(_naf(k, width=2)):
        acc = g2_add(acc, acc)
        if d == 1:
            acc = g2_add(acc, p)
        elif d == -1:
            acc = g2_add(acc, neg)
    return acc


def g2_mul_raw(p: G2Point, k: int) -> G2Point:
    """Scalar multiplication without reducing k mod r (for order checks)."""
    if p is None or k == 0:
        return None
    if k < 0:
        return g2_mul_raw(g2_neg(p), -k)
    acc = None
    neg = g2_neg(p)
    for d in reversed(_naf(k, width=2)):
        acc = g2_add(acc, acc)
        if d == 1:
            acc = g2_add(acc, p)
        elif d == -1:
            acc = g2_add(acc, neg)
    return acc


def g2_in_subgroup(p: G2Point) -> bool:
    return g2_is_on_curve(p) and g2_mul_raw(p, int(R)) is None


# Frobenius acting on twist points: psi(pi(Q)) = pi(psi(Q)).
_TW_FROB_X: Fq2 = fq2_pow(XI, (Q - 1) // 3)
_TW_FROB_Y: Fq2 = fq2_pow(XI, (Q - 1) // 2)


def _g2_frob(p: G2Point) -> G2Point:
    x, y = p
    return (fq2_mul(fq2_conj(x), _TW_FROB_X), fq2_mul(fq2_conj(y), _TW_FROB_Y))


# ---------------------------------------------------------------------------
# Optimal ate pairing


ATE_LOOP = 6 * Z_BN + 2
_ATE_DIGITS = list(reversed(_naf(ATE_LOOP, width=2)))[1:]


def _line_eval(r: G2Point, s: G2Point, p: G1Point):
    """Chord (or tangent when r == s) through r, s evaluated at p.

    Returns the new point r + s together with the sparse Fq12 line value
    (c0, cw, cw3) occupying the w^0, w^1 and w^3 slots.
    """
    x1, y1 = r
    x2, y2 = s
    if x1 == x2 and y1 == y2:
        lam = fq2_mul(fq2_smul(fq2_sq(x1), 3), fq2_inv(fq2_smul(y1, 2)))
    else:
        lam = fq2_mul(fq2_sub(y2, y1), fq2_inv(fq2_sub(x2, x1)))
    x3 = fq2_sub(fq2_sub(fq2_sq(lam), x1), x2)
    y3 = fq2_sub(fq2_mul(lam, fq2_sub(x1, x3)), y1)
    c0 = p[1]
    cw = fq2_neg(fq2_smul(lam, p[0]))
    cw3 = fq2_sub(fq2_mul(lam, x1), y1)
    return (x3, y3), c0, cw, cw3


def _fq6_mul_sparse(a: Fq6, b: Fq2, c: Fq2):
    """Multiply by the sparse Fq6 element b + c*v; output is unreduced."""
    (x00, x01), (x10, x11), (x20, x21) = a
    b0, b1 = b
    c0, c1 = c
    t0 = x00 * b0
    t1 = x01 * b1
    p0 = t0 - t1
    p1 = (x00 + x01) * (b0 + b1) - t0 - t1
    t0 = x20 * c0
    t1 = x21 * c1
    q0 = t0 - t1
    q1 = (x20 + x21) * (c0 + c1) - t0 - t1
    r00 = p0 + 9 * q0 - q1
    r01 = p1 + q0 + 9 * q1
    t0 = x00 * c0
    t1 = x01 * c1
    p0 = t0 - t1
    p1 = (x00 + x01) * (c0 + c1) - t0 - t1
    t0 = x10 * b0
    t1 = x11 * b1
    q0 = t0 - t1
    q1 = (x10 + x11) * (b0 + b1) - t0 - t1
    r10 = p0 + q0
    r11 = p1 + q1
    t0 = x10 * c0
    t1 = x11 * c1
    p0 = t0 - t1
    p1 = (x10 + x11) * (c0 + c1) - t0 - t1
    t0 = x20 * b0
    t1 = x21 * b1
    q0 = t0 - t1
    q1 = (x20 + x21) * (b0 + b1) - t0 - t1
    r20 = p0 + q0
    r21 = p1 + q1
    return (r00, r01, r10, r11, r20, r21)


def _fq12_mul_line(f: Fq12, c0, cw: Fq2, cw3: Fq2) -> Fq12:
    """Multiply f by the sparse line value c0 + cw*w + cw3*w^3."""
    f0, f1 = f
    (a00, a01), (a10, a11), (a20, a21) = f0
    (b00, b01), (b10, b11), (b20, b21) = f1
    s00, s01, s10, s11, s20, s21 = _fq6_mul_sparse(f0, cw, cw3)
    t00, t01, t10, t11, t20, t21 = _fq6_mul_sparse(f1, cw, cw3)
    n0 = (
        ((a00 * c0 + 9 * t20 - t21) % Q, (a01 * c0 + t20 + 9 * t21) % Q),
        ((a10 * c0 + t00) % Q, (a11 * c0 + t01) % Q),
        ((a20 * c0 + t10) % Q, (a21 * c0 + t11) % Q),
    )
    n1 = (
        ((b00 * c0 + s00) % Q, (b01 * c0 + s01) % Q),
        ((b10 * c0 + s10) % Q, (b11 * c0 + s11) % Q),
        ((b20 * c0 + s20) % Q, (b21 * c0 + s21) % Q),
    )
    return (n0, n1)


def miller_loop_multi(pairs: Sequence[Tuple[G1Point, G2Point]]) -> Fq12:
    """Shared Miller loop over several (P, Q) pairs; no final exponentiation."""
    live = [(p, q) for p, q in pairs if p is not None and q is not None]
    if not live:
        return FQ12_ONE
    rs = [q for _, q in live]
    negs = [g2_neg(q) for _, q in live]
    f = FQ12_ONE
    for d in _ATE_DIGITS:
        f = fq12_sq(f)
        for i, (p, q) in enumerate(live):
            rs[i], c0, cw, cw3 = _line_eval(rs[i], rs[i], p)
            f = _fq12_mul_line(f, c0, cw, cw3)
        if d == 1:
            for i, (p, q) in enumerate(live):
                rs[i], c0, cw, cw3 = _line_eval(rs[i], q, p)
                f = _fq12_mul_line(f, c0, cw, cw3)
        elif d == -1:
            for i, (p, q) in enumerate(live):
                rs[i], c0, cw, cw3 = _line_eval(rs[i], negs[i], p)
                f = _fq12_mul_line(f, c0, cw, cw3)
    for i, (p, q) in enumerate(live):
        q1 = _g2_frob(q)
        q2 = g2_neg(_g2_frob(q1))
        rs[i], c0, cw, cw3 = _line_eval(rs[i], q1, p)
        f = _fq12_mul_line(f, c0, cw, cw3)
        rs[i], c0, cw, cw3 = _line_eval(rs[i], q2, p)
        f = _fq12_mul_line(f, c0, cw, cw3)
    return f


def _cyc_exp_z(f: Fq12) -> Fq12:
    """f^z for unitary f, using conjugation as inversion."""
    acc = FQ12_ONE
    started = False
    for d in reversed(_naf(Z_BN, width=2)):
        if started:
            acc = fq12_sq(acc)
        if d == 1:
            acc = fq12_mul(acc, f) if started else f
            started = True
        elif d == -1:
            acc = fq12_mul(acc, fq12_conj(f))
            started = True
    return acc


def final_exp(f: Fq12) -> Fq12:
    """Map a Miller loop value to the order-r subgroup of Fq12*."""
    # Easy part: f^((q^6 - 1)(q^2 + 1)); the result is unitary.
    f = fq12_mul(fq12_conj(f), fq12_inv(f))
    f = fq12_mul(fq12_frob(fq12_frob(f)), f)
    # Hard part: f^((q^4 - q^2 + 1)/r) via the standard z-exponent chain.
    fu = _cyc_exp_z(f)
    fu2 = _cyc_exp_z(fu)
    fu3 = _cyc_exp_z(fu2)
    fp = fq12_frob(f)
    fp2 = fq12_frob(fp)
    fp3 = fq12_frob(fp2)
    fup = fq12_frob(fu)
    fu2p = fq12_frob(fu2)
    fu3p = fq12_frob(fu3)
    y0 = fq12_mul(fq12_mul(fp, fp2), fp3)
    y1 = fq12_conj(f)
    y2 = fq12_frob(fq12_frob(fu2))
    y3 = fq12_conj(fup)
    y4 = fq12_conj(fq12_mul(fu, fu2p))
    y5 = fq12_conj(fu2)
    y6 = fq12_conj(fq12_mul(fu3, fu3p))
    t0 = fq12_mul(fq12_mul(fq12_sq(y6), y4), y5)
    t1 = fq12_mul(fq12_mul(y3, y5), t0)
    t0 = fq12_mul(t0, y2)
    t1 = fq12_sq(fq12_mul(fq12_sq(t1), t0))
    t0 = fq12_mul(t1, y1)
    t1 = fq12_mul(t1, y0)
    t0 = fq12_sq(t0)
    return fq12_mul(t0, t1)


def pairing(p: G1Point, q: G2Point) -> Fq12:
    return final_exp(miller_loop_multi([(p, q)]))


def pairing_multi(pairs: Sequence[Tuple[G1Point, G2Point]]) -> Fq12:
    """Product of pairings over all pairs, with one shared final exponentiation."""
    return final_exp(miller_loop_multi(pairs))


GT_ONE: Fq12 = FQ12_ONE


def gt_mul(a: Fq12, b: Fq12) -> Fq12:
    return fq12_mul(a, b)


def gt_exp(a: Fq12, k) -> Fq12:
    """a^k for a in the order-r subgroup (pairing outputs are unitary)."""
    k = mpz(k) % R
    if k == 0:
        return FQ12_ONE
    conj = fq12_conj(a)
    acc = FQ12_ONE
    started = False
    for d in reversed(_naf(k, width=2)):
        if started:
            acc = fq12_sq(acc)
        if d == 1:
            acc = fq12_mul(acc, a) if started else a
            started = True
        elif d == -1:
            acc = fq12_mul(acc, conj) if started else conj
            started = True
    return acc


def gt_inv(a: Fq12) -> Fq12:
    return fq12_conj(a)


# ---------------------------------------------------------------------------
# Shallue-van de Woestijne map to G1 (cofactor 1, so no clearing step)


def _is_square_fq(a) -> bool:
    a = mpz(a) % Q
    return a == 0 or powmod(a, (Q - 1) // 2, Q) == 1


def _g_of(x) -> mpz:
    return (x * x * x + B_G1) % Q


def _find_svdw_z() -> mpz:
    cand = 1
    while True:
        for z in (mpz(cand), mpz(-cand) % Q):
            gz = _g_of(z)
            if gz == 0:
                continue
            t = -3 * z * z % Q
            if t == 0 or not _is_square_fq(gz * t % Q):
                continue
            if _is_square_fq(gz) or _is_square_fq(_g_of(-z * invert(2, Q) % Q)):
                return z
        cand += 1


_SVDW_Z = _find_svdw_z()
_SVDW_C1 = _g_of(_SVDW_Z)
_SVDW_C2 = -_SVDW_Z * invert(2, Q) % Q
_SVDW_C3 = sqrt_fq(-_SVDW_C1 * (3 * _SVDW_Z * _SVDW_Z) % Q)
if _SVDW_C3 & 1:
    _SVDW_C3 = -_SVDW_C3 % Q
_SVDW_C4 = -4 * _SVDW_C1 * invert(3 * _SVDW_Z * _SVDW_Z, Q) % Q


def svdw_map(u) -> G1Point:
    """Deterministic field-to-curve map; never fails, output may be any point."""
    u = mpz(u) % Q
    tv1 = u * u * _SVDW_C1 % Q
    tv2 = (1 + tv1) % Q
    tv1 = (1 - tv1) % Q
    tv3 = tv1 * tv2 % Q
    tv3 = invert(tv3, Q) if tv3 != 0 else mpz(0)
    tv4 = u * tv1 * tv3 * _SVDW_C3 % Q
    x1 = (_SVDW_C2 - tv4) % Q
    gx1 = _g_of(x1)
    e1 = _is_square_fq(gx1)
    x2 = (_SVDW_C2 + tv4) % Q
    gx2 = _g_of(x2)
    e2 = _is_square_fq(gx2) and not e1
    x3 = (tv2 * tv2 * tv3) % Q
    x3 = (x3 * x3 * _SVDW_C4 + _SVDW_Z) % Q
    x = x3
    if e1:
        x = x1
    elif e2:
        x = x2
    y = sqrt_fq(_g_of(x))
    if int(u & 1) != int(y & 1):
        y = -y % Q
    return (x, y)
