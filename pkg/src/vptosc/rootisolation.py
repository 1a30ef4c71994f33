"""Real-root isolation and refinement for exact rational polynomials.

Roots are isolated with a Sturm sequence computed in exact arithmetic, so the
number of distinct real roots is certified, then refined by exact bisection
followed by a floating Newton polish at the requested precision. A final
exact sign check re-certifies that the refined value encloses the root; if
the polish cannot be certified the slow all-exact bisection path finishes
the job.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from mpmath import mp

from .series_core import DEFAULT_DPS, RationalPolynomial

# Relative interval width at which exact bisection hands over to Newton.
_HANDOVER = Fraction(1, 10**25)


def _eval(coeffs: tuple[Fraction, ...], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


def _primitive(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    """Scale by a positive rational so coefficients are coprime integers."""
    if not coeffs:
        return ()
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints)


def _rem(a: tuple[Fraction, ...], b: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """Remainder of a / b over the rationals (b nonzero)."""
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    while len(r) - 1 >= db and any(c != 0 for c in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        q = r[-1] / lead
        shift = len(r) - 1 - db
        for i, c in enumerate(b):
            r[shift + i] -= q * c
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def _derivative(coeffs: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    return tuple(i * c for i, c in enumerate(coeffs) if i > 0)


def poly_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    """Monic greatest common divisor over the rationals."""
    ca, cb = a.coeffs, b.coeffs
    while cb:
        ca, cb = cb, _rem(ca, cb)
        cb = _primitive(list(cb))
    if not ca:
        return RationalPolynomial()
    lead = ca[-1]
    return RationalPolynomial(c / lead for c in ca)


def squarefree_part(poly: RationalPolynomial) -> RationalPolynomial:
    """poly / gcd(poly, poly'): same distinct roots, all simple."""
    if poly.is_zero:
        raise ValueError("zero polynomial")
    if poly.degree <= 1:
        return poly
    g = poly_gcd(poly, poly.derivative())
    if g.degree == 0:
        return poly
    quot, rem = _divmod(poly.coeffs, g.coeffs)
    assert not rem, "gcd must divide exactly"
    return RationalPolynomial(quot)


def _divmod(a: tuple[Fraction, ...], b: tuple[Fraction, ...]):
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    while len(r) - 1 >= db and any(c != 0 for c in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        coef = r[-1] / lead
        shift = len(r) - 1 - db
        q[shift] = coef
        for i, c in enumerate(b):
            r[shift + i] -= coef * c
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    return q, tuple(r)


def sturm_chain(poly: RationalPolynomial) -> list[tuple[Fraction, ...]]:
    """Sturm sequence of a squarefree polynomial, primitive-normalized."""
    chain = [_primitive(list(poly.coeffs))]
    d = _derivative(chain[0])
    if d:
        chain.append(_primitive(list(d)))
    while len(chain[-1]) > 1:
        r = _rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_primitive([-c for c in r]))
    return chain


def _variations(signs: list[int]) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def _variations_at(chain, x: Fraction) -> int:
    return _variations([_sign(_eval(c, x)) for c in chain])


def _variations_at_inf(chain, positive: bool) -> int:
    signs = []
    for c in chain:
        s = _sign(c[-1])
        if not positive and (len(c) - 1) % 2 == 1:
            s = -s
        signs.append(s)
    return _variations(signs)


def sturm_root_count(
    poly: RationalPolynomial,
    lo: Fraction | None = None,
    hi: Fraction | None = None,
) -> int:
    """Certified number of distinct real roots in (lo, hi] (whole line by default)."""
    if poly.is_zero:
        raise ValueError("zero polynomial")
    if poly.degree < 1:
        return 0
    f = squarefree_part(poly)
    chain = sturm_chain(f)
    va = _variations_at(chain, lo) if lo is not None else _variations_at_inf(chain, positive=False)
    vb = _variations_at(chain, hi) if hi is not None else _variations_at_inf(chain, positive=True)
    return va - vb


def cauchy_bound(poly: RationalPolynomial) -> Fraction:
    """B with every real root strictly inside (-B, B)."""
    lead = abs(poly.coeffs[-1])
    return 1 + max(abs(c) / lead for c in poly.coeffs)


def _int_nth_root_ceil(m: int, k: int) -> int:
    """Smallest integer r with r**k >= m (m >= 0)."""
    if m <= 1 or k == 1:
        return m
    x = 1 << (-(-m.bit_length() // k))  # upper bound on m^(1/k)
    while True:  # integer Newton, converges from above to the floor root
        t = ((k - 1) * x + m // x ** (k - 1)) // k
        if t >= x:
            break
        x = t
    return x if x**k >= m else x + 1


def fujiwara_bound(poly: RationalPolynomial) -> Fraction:
    """Root magnitude bound 2 * max_k |c_{n-k}/c_n|^{1/k}, rounded up.

    Far tighter than the Cauchy bound when the leading coefficient is small,
    which is the generic situation for the scaling polynomials.
    """
    n = poly.degree
    lead = abs(poly.coeffs[-1])
    best = 1
    for k in range(1, n + 1):
        ratio = abs(poly.coeffs[n - k]) / lead
        if ratio == 0:
            continue
        m = ratio.numerator // ratio.denominator + 1
        best = max(best, _int_nth_root_ceil(m, k))
    return Fraction(2 * best)


def root_bound(poly: RationalPolynomial) -> Fraction:
    return min(cauchy_bound(poly), fujiwara_bound(poly))


def _isolate(f: RationalPolynomial):
    """Isolating intervals for a squarefree polynomial with no rational roots
    at dyadic subdivision points; returns ('root', m) when one is hit."""
    bound = root_bound(f)
    chain = sturm_chain(f)
    intervals = []
    v_lo = _variations_at(chain, -bound)
    v_hi = _variations_at(chain, bound)
    stack = [(-bound, bound, v_lo, v_hi)]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count == 0:
            continue
        m = (a + b) / 2
        if count == 1:
            intervals.append((a, b))
            continue
        if _eval(f.coeffs, m) == 0:
            return ("root", m)
        vm = _variations_at(chain, m)
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))
    return ("intervals", intervals)


def _fraction_from_mpf(x) -> Fraction:
    """Exact value of an mpf (a dyadic rational)."""
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    val = Fraction(man) * Fraction(2) ** exp
    return -val if sign else val


def _refine(f: RationalPolynomial, a: Fraction, b: Fraction, dps: int):
    """Refine a bracketed simple root to dps digits; returns an mpf."""
    coeffs = f.coeffs
    sa = _sign(_eval(coeffs, a))
    # exact bisection down to the Newton handover width
    while b - a > _HANDOVER * max(1, abs(a), abs(b)):
        m = (a + b) / 2
        sm = _sign(_eval(coeffs, m))
        if sm == 0:
            with mp.workdps(dps):
                return mp.mpf(m.numerator) / mp.mpf(m.denominator)
        if sm == sa:
            a = m
        else:
            b = m

    work = dps + 15
    with mp.workdps(work):
        fm = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in coeffs]
        dm = [i * c for i, c in enumerate(fm)][1:]
        lo = mp.mpf(a.numerator) / mp.mpf(a.denominator)
        hi = mp.mpf(b.numerator) / mp.mpf(b.denominator)
        x = (lo + hi) / 2
        eps = mp.mpf(10) ** (-(dps + 5))
        for _ in range(200):
            fx = mp.polyval(list(reversed(fm)), x)
            dfx = mp.polyval(list(reversed(dm)), x)
            if dfx == 0:
                break
            step = fx / dfx
            x_new = x - step
            if x_new < lo or x_new > hi:
                x_new = (lo + hi) / 2
            done = abs(x_new - x) <= eps * max(1, abs(x_new))
            x = x_new
            if done:
                break

    # certify: the polynomial must change sign across x +- delta
    xf = _fraction_from_mpf(x)
    delta = Fraction(1, 10 ** (dps - 1)) * max(1, abs(xf))
    s_lo = _sign(_eval(coeffs, xf - delta))
    s_hi = _sign(_eval(coeffs, xf + delta))
    if s_lo == 0 or s_hi == 0 or s_lo != s_hi:
        with mp.workdps(dps):
            return +x
    # Newton could not be certified: finish with exact bisection
    target = Fraction(1, 10 ** (dps + 2))
    while b - a > target * max(1, abs(a), abs(b)):
        m = (a + b) / 2
        sm = _sign(_eval(coeffs, m))
        if sm == 0:
            a = b = m
            break
        if sm == sa:
            a = m
        else:
            b = m
    mid = (a + b) / 2
    with mp.workdps(dps):
        return mp.mpf(mid.numerator) / mp.mpf(mid.denominator)


def real_roots(poly: RationalPolynomial, dps: int = DEFAULT_DPS) -> list:
    """All distinct real roots, ascending, refined to dps significant digits.

    The root count matches the Sturm count of the exact polynomial by
    construction. Raises on the zero polynomial; a nonzero constant has no
    roots.
    """
    if poly.is_zero:
        raise ValueError("zero polynomial has no well-defined roots")
    if poly.degree < 1:
        return []
    f = squarefree_part(poly)
    if f.degree == 1:
        root = -f.coeffs[0] / f.coeffs[1]
        with mp.workdps(dps):
            return [mp.mpf(root.numerator) / mp.mpf(root.denominator)]

    exact: list[Fraction] = []
    while True:
        status, payload = _isolate(f)
        if status == "intervals":
            intervals = payload
            break
        exact.append(payload)
        quot, rem = _divmod(f.coeffs, (-payload, Fraction(1)))
        assert not rem, "exact root must divide"
        f = RationalPolynomial(quot)
        if f.degree < 1:
            intervals = []
            break

    roots = []
    with mp.workdps(dps):
        roots.extend(mp.mpf(r.numerator) / mp.mpf(r.denominator) for r in exact)
    roots.extend(_refine(f, a, b, dps) for a, b in intervals)
    return sorted(roots)


def _small_divisors(n: int, limit: int = 10**6, hard_cap: int = 10**12) -> list[int]:
    """All positive divisors of |n|; requires prime factors be enumerable."""
    n = abs(n)
    if n == 0:
        raise ValueError("zero has no divisor list")
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n and d <= limit:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        if n > hard_cap:
            raise ValueError("coefficient too large for exact rational root search")
        factors[n] = factors.get(n, 0) + 1
    divisors = [1]
    for prime, mult in factors.items():
        divisors = [d * prime**e for d in divisors for e in range(mult + 1)]
    return sorted(divisors)


def rational_roots(poly: RationalPolynomial) -> list[Fraction]:
    """All rational roots (exact), ascending; conservative coefficient limits."""
    if poly.is_zero:
        raise ValueError("zero polynomial has no well-defined roots")
    if poly.degree < 1:
        return []
    prim = _primitive(list(poly.coeffs))
    roots = []
    low = 0
    while prim[low] == 0:
        low += 1
    if low:
        roots.append(Fraction(0))
        prim = prim[low:]
    a0 = int(prim[0])
    an = int(prim[-1])
    for num in _small_divisors(a0):
        for den in _small_divisors(an):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if _eval(prim, cand) == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)
