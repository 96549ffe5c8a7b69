"""Residue-field helpers: F_p[x] polynomial arithmetic, F_q elements, and
small linear algebra mod p.

Polynomials are lists of ints (least significant first), always reduced
mod p.  F_q elements are coefficient vectors of length d, reduced modulo a
monic irreducible polynomial.
"""

from __future__ import annotations


def poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mulmod(a: list[int], b: list[int], g: list[int], p: int) -> list[int]:
    """a*b mod (g, p), g monic."""
    d = len(g) - 1
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k]
        if c:
            out[k] = 0
            for l in range(d):
                out[k - d + l] = (out[k - d + l] - c * g[l]) % p
    return poly_trim(out)


def poly_powmod(a: list[int], n: int, g: list[int], p: int) -> list[int]:
    result = [1]
    base = list(a)
    while n:
        if n & 1:
            result = poly_mulmod(result, base, g, p)
        base = poly_mulmod(base, base, g, p)
        n >>= 1
    return result


def poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while poly_trim(b):
        # a mod b, b monic-ised on the fly
        inv = pow(b[-1], p - 2, p)
        bb = [(c * inv) % p for c in b]
        r = list(a)
        while len(r) >= len(bb) and poly_trim(r):
            c = r[-1]
            shift = len(r) - len(bb)
            for i, bc in enumerate(bb):
                r[shift + i] = (r[shift + i] - c * bc) % p
            poly_trim(r)
        a, b = b, r
    return a


def is_irreducible(g: list[int], p: int) -> bool:
    """Monic g irreducible over F_p (x^{p^d} = x, and gcd tests at maximal
    proper divisors)."""
    d = len(g) - 1
    if d <= 0:
        return False
    x = poly_mulmod([1], [0, 1], g, p)
    xq = list(x)
    for _ in range(d):
        xq = poly_powmod(xq, p, g, p)
    if poly_trim([(a - b) % p for a, b in zip_pad(xq, x)]):
        return False
    for l in prime_divisors(d):
        xe = list(x)
        for _ in range(d // l):
            xe = poly_powmod(xe, p, g, p)
        diff = poly_trim([(a - b) % p for a, b in zip_pad(xe, x)])
        if not diff:
            return False
        if len(poly_gcd(g, diff, p)) > 1:
            return False
    return True


def zip_pad(a: list[int], b: list[int]):
    n = max(len(a), len(b))
    return zip(a + [0] * (n - len(a)), b + [0] * (n - len(b)))


def prime_divisors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def smallest_irreducible(p: int, d: int) -> list[int]:
    """Lexicographically smallest monic irreducible of degree d over F_p."""
    if d == 1:
        return [0, 1]  # x itself is fine as a placeholder; callers use d >= 2
    for code in range(p**d):
        coeffs = []
        c = code
        for _ in range(d):
            coeffs.append(c % p)
            c //= p
        g = coeffs + [1]
        if is_irreducible(g, p):
            return g
    raise AssertionError("no irreducible polynomial found")


def mat_rank(rows: list[list[int]], p: int) -> int:
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] % p), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        m[rank] = [(c * inv) % p for c in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] % p:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def mat_nullspace(rows: list[list[int]], p: int, ncols: int) -> list[list[int]]:
    """Basis of the right nullspace of the matrix (rows over F_p)."""
    m = [list(r) for r in rows]
    pivots: dict[int, int] = {}
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] % p), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        m[rank] = [(c * inv) % p for c in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] % p:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        pivots[col] = rank
        rank += 1
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for col, r in pivots.items():
            v[col] = (-m[r][fc]) % p
        basis.append(v)
    return basis
