"""Precision-tracked arithmetic in the fixed four-level tower

    Qp  <  K  <  Kprime  <  L

where K/Qp is unramified of degree d, Kprime = K(gam) with gam^(p-1) = -p
(Eisenstein, so gam is a uniformizer), and L = Kprime(T) with T^p = x for a
designated unit x of Kprime satisfying v(x - 1) = 1/(p-1).

Element data layouts (all integers reduced mod p^m, m the working digit
count of the tower):

    Qp      int
    K       list of d ints              (power basis of y, f(y) = 0)
    Kprime  list of p-1 K-vectors       (powers of gam)
    L       list of p Kprime-vectors    (powers of W = T - 1)

The defining polynomial f of K is the minimal polynomial of the Teichmuller
lift of a normal basis generator of the residue field, so y itself is a
Teichmuller element (y^q = y) and a normal basis generator.  In these bases
an element is divisible by p iff all its integer coordinates are, and the
valuation of an element is the exact minimum over its monomial valuations
(the monomial valuations are pairwise distinct modulo the ramification).

A PadicElem wraps raw data with a p-power denominator shift and a claimed
absolute precision; arithmetic updates the claim pessimistically and never
rounds: membership and equality checks error out rather than coerce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .residue import (
    is_irreducible,
    mat_nullspace,
    mat_rank,
    poly_powmod,
    smallest_irreducible,
)

QP = "Qp"
K = "K"
KPRIME = "Kprime"
L = "L"


def _vp(n: int, p: int, cap: int) -> int | None:
    """p-adic valuation of an integer known mod p^cap; None if it vanishes."""
    n %= p**cap
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class Tower:
    """Levels Qp, K and Kprime; L is provided by KummerTower on top."""

    def __init__(self, p: int, d: int, fcoeffs: list[int], m: int,
                 teich_gen: bool = True):
        if p < 3:
            raise ValueError("p must be an odd prime")
        self.p = p
        self.d = d
        self.m = m
        self.pm = p**m
        self.q = p**d
        self.f = [c % self.pm for c in fcoeffs]
        assert len(self.f) == d + 1 and self.f[d] == 1, "f must be monic of degree d"
        self.fbar = [c % p for c in self.f]
        if not is_irreducible(self.fbar if d > 1 else [self.fbar[0], 1], p):
            raise ValueError("defining polynomial must be irreducible mod p")
        if d == 1:
            self.ygen = [(-self.f[0]) % self.pm]
        else:
            self.ygen = [0, 1] + [0] * (d - 2)
        self._init_frobenius()
        self.tr_basis = self._trace_basis()
        self.eta = self.ygen  # Teichmuller normal basis generator by construction
        if teich_gen:
            assert self.kpow(self.eta, self.q) == self.eta, "generator is not Teichmuller"

    # ---------------- K arithmetic (vectors of length d) ----------------

    def kzero(self) -> list[int]:
        return [0] * self.d

    def kone(self) -> list[int]:
        return [1] + [0] * (self.d - 1)

    def kfrom_int(self, n: int) -> list[int]:
        return [n % self.pm] + [0] * (self.d - 1)

    def kadd(self, a, b):
        pm = self.pm
        return [(x + y) % pm for x, y in zip(a, b)]

    def ksub(self, a, b):
        pm = self.pm
        return [(x - y) % pm for x, y in zip(a, b)]

    def kneg(self, a):
        pm = self.pm
        return [(-x) % pm for x in a]

    def kscal(self, a, n: int):
        pm = self.pm
        return [(x * n) % pm for x in a]

    def kmul(self, a, b):
        d, pm, f = self.d, self.pm, self.f
        if d == 1:
            return [a[0] * b[0] % pm]
        out = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        for deg in range(2 * d - 2, d - 1, -1):
            c = out[deg] % pm
            if c:
                out[deg] = 0
                for l in range(d):
                    out[deg - d + l] -= c * f[l]
        return [c % pm for c in out[:d]]

    def kpow(self, a, n: int):
        result = self.kone()
        base = a
        while n:
            if n & 1:
                result = self.kmul(result, base)
            base = self.kmul(base, base)
            n >>= 1
        return result

    def khorner(self, coeffs: list[int], z):
        """Evaluate an integer-coefficient polynomial at a K element."""
        acc = self.kzero()
        for c in reversed(coeffs):
            acc = self.kmul(acc, z)
            acc = self.kadd(acc, self.kfrom_int(c))
        return acc

    def kresidue(self, a) -> list[int]:
        return [c % self.p for c in a]

    def klift(self, coords: list[int]) -> list[int]:
        return [c % self.pm for c in coords]

    def kinv(self, a):
        """Inverse of a unit by Newton iteration from the residue inverse."""
        res = self.kresidue(a)
        assert any(res), "not a unit"
        g = self.fbar if self.d > 1 else [self.fbar[0], 1]
        rinv = poly_powmod(res, self.q - 2, g, self.p)
        t = self.klift(rinv + [0] * (self.d - len(rinv)))
        two = self.kfrom_int(2)
        for _ in range(max(1, m_bits(self.m)) + 2):
            t = self.kmul(t, self.ksub(two, self.kmul(a, t)))
        assert self.kmul(a, t) == self.kone(), "inversion failed"
        return t

    def kval(self, a) -> int | None:
        vals = [v for c in a if (v := _vp(c, self.p, self.m)) is not None]
        return min(vals) if vals else None

    # ---------------- Frobenius and Teichmuller ----------------

    def _init_frobenius(self):
        d = self.d
        if d == 1:
            self.conj_pows = [[self.kone()]]
            return
        fprime = [(i * self.f[i]) % self.pm for i in range(1, d + 1)]
        z = self.kpow(self.ygen, self.p)
        for _ in range(m_bits(self.m) + 4):
            fz = self.khorner(self.f, z)
            if all(c % self.pm == 0 for c in fz):
                break
            z = self.ksub(z, self.kmul(fz, self.kinv(self.khorner(fprime, z))))
        assert all(c % self.pm == 0 for c in self.khorner(self.f, z)), "Frobenius lift failed"
        # conj_pows[i][l] = (i-th Frobenius power applied to y^l)
        self.conj_pows = [[self.kone()] + [None] * (d - 1) for _ in range(d)]
        cur = self.ygen
        for i in range(d):
            acc = self.kone()
            for l in range(1, d):
                acc = self.kmul(acc, cur)
                self.conj_pows[i][l] = acc
            if i + 1 < d:
                cur = self._subst(z, cur)
        # order check: frobenius^d = identity
        img = self.ygen
        for _ in range(d):
            img = self._subst(z, img)
        assert img == self.ygen, "Frobenius does not have order d"

    def _subst(self, z, a):
        """Evaluate the K element a (poly in y) at z."""
        acc = self.kzero()
        for c in reversed(a):
            acc = self.kmul(acc, z)
            acc = self.kadd(acc, self.kfrom_int(c))
        return acc

    def frob(self, a, i: int = 1):
        """i-th power of the Frobenius lift of x -> x^p, applied to K data."""
        i %= self.d
        if i == 0:
            return list(a)
        out = self.kzero()
        for l, c in enumerate(a):
            if c:
                out = self.kadd(out, self.kscal(self.conj_pows[i][l], c))
        return out

    def teichmuller_data(self, coords: list[int]):
        """Teichmuller lift of a nonzero residue class (power basis coords)."""
        assert any(c % self.p for c in coords), "zero residue class"
        t = self.klift(coords)
        prev = None
        for _ in range(self.m + 4):
            if t == prev:
                break
            prev = t
            t = self.kpow(t, self.q)
        assert self.kpow(t, self.q) == t, "Teichmuller iteration did not stabilise"
        return t

    def _trace_basis(self) -> list[int]:
        out = []
        for l in range(self.d):
            s = self.kzero()
            for i in range(self.d):
                s = self.kadd(s, self.conj_pows[i][l])
            assert all(c % self.pm == 0 for c in s[1:]), "trace not rational"
            out.append(s[0])
        return out

    def ktrace(self, a) -> int:
        return sum(c * t for c, t in zip(a, self.tr_basis)) % self.pm

    def knorm(self, a) -> int:
        prod = self.kone()
        for i in range(self.d):
            prod = self.kmul(prod, self.frob(a, i))
        assert all(c % self.pm == 0 for c in prod[1:]), "norm not rational"
        return prod[0]

    def trace_eta(self) -> int:
        return self.ktrace(self.eta)

    # ---------------- Kprime arithmetic (gamma-power vectors) ----------------

    def pzero(self):
        return [self.kzero() for _ in range(self.p - 1)]

    def pone(self):
        return [self.kone()] + [self.kzero() for _ in range(self.p - 2)]

    def pfrom_k(self, a):
        return [list(a)] + [self.kzero() for _ in range(self.p - 2)]

    def pgamma(self):
        z = self.pzero()
        z[1] = self.kone()
        return z

    def padd(self, a, b):
        return [self.kadd(x, y) for x, y in zip(a, b)]

    def psub(self, a, b):
        return [self.ksub(x, y) for x, y in zip(a, b)]

    def pneg(self, a):
        return [self.kneg(x) for x in a]

    def pscal(self, a, n: int):
        return [self.kscal(x, n) for x in a]

    def pscal_k(self, a, kdata):
        return [self.kmul(x, kdata) for x in a]

    def pmul(self, a, b):
        e = self.p - 1
        out = [self.kzero() for _ in range(2 * e - 1)]
        for i in range(e):
            if any(a[i]):
                for j in range(e):
                    if any(b[j]):
                        out[i + j] = self.kadd(out[i + j], self.kmul(a[i], b[j]))
        # gam^(p-1) = -p
        for deg in range(2 * e - 2, e - 1, -1):
            c = out[deg]
            if any(c):
                out[deg - e] = self.kadd(out[deg - e], self.kscal(c, -self.p))
        return out[:e]

    def ppow(self, a, n: int):
        result = self.pone()
        base = a
        while n:
            if n & 1:
                result = self.pmul(result, base)
            base = self.pmul(base, base)
            n >>= 1
        return result

    def pfrob(self, a, i: int = 1):
        """Frobenius extended to Kprime coefficient-wise (it fixes gam)."""
        return [self.frob(c, i) for c in a]

    def presidue(self, a) -> list[int]:
        return self.kresidue(a[0])

    def pinv(self, a):
        res = self.presidue(a)
        assert any(res), "not a unit in O_Kprime"
        t = self.pfrom_k(self.klift(self._kresinv(res)))
        two = self.pfrom_k(self.kfrom_int(2))
        for _ in range(m_bits(self.m) + 3):
            t = self.pmul(t, self.psub(two, self.pmul(a, t)))
        assert self.pmul(a, t) == self.pone(), "inversion failed"
        return t

    def _kresinv(self, res):
        g = self.fbar if self.d > 1 else [self.fbar[0], 1]
        rinv = poly_powmod(res, self.q - 2, g, self.p)
        return rinv + [0] * (self.d - len(rinv))

    def pval(self, a) -> int | None:
        """Valuation in units of 1/(p-1); exact (distinct residues per index)."""
        best = None
        for j, c in enumerate(a):
            v = self.kval(c)
            if v is not None:
                u = (self.p - 1) * v + j
                best = u if best is None else min(best, u)
        return best

    def ptrace_to_zeta_field(self, a):
        """Trace from Kprime to Qp(gam) = Qp(zeta): Frobenius orbit sum."""
        s = self.pzero()
        for i in range(self.d):
            s = self.padd(s, self.pfrob(a, i))
        self.assert_rational_coeffs(s)
        return s

    def pnorm_to_zeta_field(self, a):
        prod = self.pone()
        for i in range(self.d):
            prod = self.pmul(prod, self.pfrob(a, i))
        self.assert_rational_coeffs(prod)
        return prod

    def assert_rational_coeffs(self, a, digits: int | None = None):
        """Check membership in Qp(gam): all gamma-coefficients rational."""
        mod = self.p ** (self.m if digits is None else min(digits, self.m))
        for c in a:
            if any(x % mod for x in c[1:]):
                raise PrecisionError("element does not lie in Qp(zeta) at precision")

    # ---------------- raw dispatch used by PadicElem ----------------

    def e_of(self, level: str) -> int:
        return {QP: 1, K: 1, KPRIME: self.p - 1}[level]

    def rzero(self, level):
        return {QP: 0, K: self.kzero(), KPRIME: self.pzero()}[level] if level != QP else 0

    def rone(self, level):
        if level == QP:
            return 1
        return self.kone() if level == K else self.pone()

    def radd(self, level, a, b):
        if level == QP:
            return (a + b) % self.pm
        return self.kadd(a, b) if level == K else self.padd(a, b)

    def rsub(self, level, a, b):
        if level == QP:
            return (a - b) % self.pm
        return self.ksub(a, b) if level == K else self.psub(a, b)

    def rneg(self, level, a):
        if level == QP:
            return (-a) % self.pm
        return self.kneg(a) if level == K else self.pneg(a)

    def rmul(self, level, a, b):
        if level == QP:
            return (a * b) % self.pm
        return self.kmul(a, b) if level == K else self.pmul(a, b)

    def rscal(self, level, a, n):
        if level == QP:
            return (a * n) % self.pm
        return self.kscal(a, n) if level == K else self.pscal(a, n)

    def rval(self, level, a):
        if level == QP:
            return _vp(a, self.p, self.m)
        return self.kval(a) if level == K else self.pval(a)

    def rinv(self, level, a):
        if level == QP:
            v = _vp(a, self.p, self.m)
            assert v == 0, "not a unit"
            return pow(a, -1, self.pm)
        return self.kinv(a) if level == K else self.pinv(a)

    def root(self) -> "Tower":
        return self


class PrecisionError(ArithmeticError):
    """A membership or exactness assertion failed at working precision."""


def m_bits(m: int) -> int:
    return max(1, math.ceil(math.log2(max(2, m))))


# ---------------------------------------------------------------------------


def _data_min_div(data, p: int, cap: int) -> int:
    """Smallest p-divisibility over the integer coordinates, capped."""
    if cap <= 0:
        return 0
    if isinstance(data, int):
        if data == 0:
            return cap
        v = 0
        while v < cap and data % p == 0:
            data //= p
            v += 1
        return v
    best = cap
    for sub in data:
        best = min(best, _data_min_div(sub, p, best))
        if best == 0:
            break
    return best


def _data_div(data, pk: int):
    if isinstance(data, int):
        return data // pk
    return [_data_div(sub, pk) for sub in data]


@dataclass
class PadicElem:
    """value = data / p^shift, claimed correct to `prec` absolute p-digits."""

    ring: object
    level: str
    data: object
    shift: int = 0
    prec: int = field(default=-1)

    def __post_init__(self):
        m = self.ring.root().m
        if self.prec == -1:
            self.prec = m - self.shift
        if self.shift > 0:
            p = self.ring.root().p
            k = _data_min_div(self.data, p, self.shift)
            if k:
                self.data = _data_div(self.data, p**k)
                self.shift -= k
        self.prec = min(self.prec, m - self.shift)

    # -- helpers --

    def _compat(self, other: "PadicElem"):
        if self.level != other.level or self.ring.root() is not other.ring.root():
            raise ValueError("elements live in different rings")
        if self.level == L and self.ring is not other.ring:
            raise ValueError("elements live over different Kummer units")

    def _tw(self) -> Tower:
        return self.ring.root()

    def val(self) -> Fraction | None:
        """Exact absolute valuation (v(p) = 1), or None if the stored data
        vanishes to full working precision."""
        units = self.ring.rval(self.level, self.data)
        if units is None:
            return None
        e = self.ring.e_of(self.level)
        return Fraction(units, e) - self.shift

    def val_floor(self) -> int:
        v = self.val()
        if v is None:
            return 0
        return min(0, math.floor(v))

    def __add__(self, other: "PadicElem") -> "PadicElem":
        self._compat(other)
        tw = self._tw()
        s = max(self.shift, other.shift)
        a = self.ring.rscal(self.level, self.data, tw.p ** (s - self.shift))
        b = self.ring.rscal(self.level, other.data, tw.p ** (s - other.shift))
        return PadicElem(self.ring, self.level, self.ring.radd(self.level, a, b), s,
                         min(self.prec, other.prec))

    def __sub__(self, other: "PadicElem") -> "PadicElem":
        return self + (-other)

    def __neg__(self) -> "PadicElem":
        return PadicElem(self.ring, self.level, self.ring.rneg(self.level, self.data),
                         self.shift, self.prec)

    def __mul__(self, other):
        if isinstance(other, int):
            return PadicElem(self.ring, self.level,
                             self.ring.rscal(self.level, self.data, other),
                             self.shift, self.prec)
        self._compat(other)
        prec = min(self.prec + other.val_floor(), other.prec + self.val_floor())
        return PadicElem(self.ring, self.level,
                         self.ring.rmul(self.level, self.data, other.data),
                         self.shift + other.shift, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PadicElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicElem(self.ring, self.level, self.ring.rone(self.level), 0,
                           self._tw().m)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def inverse(self) -> "PadicElem":
        if self.val() != 0:
            raise PrecisionError("inverse requires a unit")
        if self.shift:
            raise PrecisionError("normalise shift before inverting")
        return PadicElem(self.ring, self.level, self.ring.rinv(self.level, self.data),
                         0, self.prec)

    def shifted(self, t: int) -> "PadicElem":
        """Divide by p^t (t may be negative); precision in digits drops by t."""
        return PadicElem(self.ring, self.level, self.data, self.shift + t,
                         self.prec - t)

    def is_zero_at(self, digits: int) -> bool:
        v = self.val()
        return v is None or v >= digits

    def residual(self) -> int:
        """Digits to which this element is indistinguishable from zero,
        capped by the claimed precision."""
        v = self.val()
        if v is None:
            return self.prec
        return min(self.prec, math.floor(v))


def agrees(a: PadicElem, b: PadicElem, digits: int) -> tuple[bool, int]:
    """Whether a = b to `digits` absolute p-digits; returns (ok, achieved)."""
    diff = a - b
    achieved = diff.residual()
    if achieved < digits and diff.prec < digits:
        raise PrecisionError("insufficient working precision for comparison")
    return achieved >= digits, achieved


# ---------------------------------------------------------------------------
# Unramified base construction


def build_unramified(p: int, d: int, seed: int, digits: int) -> Tower:
    """Construct K of residue degree d over Qp together with a Teichmuller
    normal basis generator (the tower's own y); deterministic in seed.

    The defining polynomial is the minimal polynomial of the Teichmuller
    lift of the chosen residue generator, so y^q = y holds exactly.
    """
    if p < 3:
        raise ValueError("p must be an odd prime")
    if d < 1:
        raise ValueError("d must be positive")
    m = digits
    pm = p**m
    if d == 1:
        cands = list(range(1, p))
        eta_bar = cands[seed % len(cands)]
        w = eta_bar % pm
        prev = None
        while w != prev:
            prev = w
            w = pow(w, p, pm)
        return Tower(p, 1, [(-w) % pm, 1], m)

    g = smallest_irreducible(p, d)
    boot = Tower(p, d, list(g), m, teich_gen=False)
    # enumerate residue classes in lex coordinate order; keep normal ones
    normal = []
    for code in range(1, p**d):
        coords = []
        c = code
        for _ in range(d):
            coords.append(c % p)
            c //= p
        rows = []
        cur = list(coords)
        for _ in range(d):
            rows.append(cur + [0] * (d - len(cur)))
            cur = poly_powmod(cur, p, boot.fbar, p)
        if mat_rank(rows, p) == d:
            normal.append(coords)
    eta_coords = normal[seed % len(normal)]
    w = boot.teichmuller_data(eta_coords)
    # f = product of (X - conjugates of w), computed in the bootstrap ring
    fpoly = [boot.kone()]
    conj = w
    for i in range(d):
        new = [boot.kzero() for _ in range(len(fpoly) + 1)]
        for deg, c in enumerate(fpoly):
            new[deg + 1] = boot.kadd(new[deg + 1], c)
            new[deg] = boot.kadd(new[deg], boot.kmul(c, boot.kneg(conj)))
        fpoly = new
        conj = boot.frob(conj)
    coeffs = []
    for c in fpoly:
        assert all(x % pm == 0 for x in c[1:]), "minimal polynomial not rational"
        coeffs.append(c[0])
    tower = Tower(p, d, coeffs, m)
    # sanity: the generator is a normal basis element with nonzero trace
    assert tower.trace_eta() % p != 0, "normal basis generator has zero trace"
    return tower


def normal_basis_matrix(tower: Tower) -> list[list[int]]:
    """Columns are the mod-p coordinates of the Frobenius orbit of y."""
    d = tower.d
    cols = [tower.kresidue(tower.frob(tower.eta, j)) for j in range(d)]
    return [[cols[j][i] for j in range(d)] for i in range(d)]


# ---------------------------------------------------------------------------
# Level-L arithmetic on top of a designated Kummer unit


class KummerTower:
    """L = Kprime(T), T^p = x, in the power basis of W = T - 1.

    W is a root of (1+W)^p - x, which is Eisenstein over Kprime because
    v(x - 1) = 1/(p-1); hence W is a uniformizer and O_L = O_Kprime[W].
    Carries the two distinguished automorphisms:

        h: T -> zeta*T          (order p, fixes Kprime)
        delta: T -> T^mu, gam -> mu*gam   (order p-1)

    with zeta the designated p-th root of unity of Kprime and mu the fixed
    Teichmuller primitive (p-1)-th root of unity in Zp.
    """

    def __init__(self, tower: Tower, x_data, zeta_data, mu: int):
        self.base = tower
        p = tower.p
        if tower.pval(tower.psub(x_data, tower.pone())) != 1:
            raise ValueError("kummer unit must satisfy v(x-1) = 1/(p-1)")
        self.x = x_data
        self.zeta = zeta_data
        self.mu = mu % tower.pm
        self.mu_pows = [pow(self.mu, j, tower.pm) for j in range(p - 1)]
        # W^p = (x - 1) - sum_{i=1..p-1} binom(p, i) W^i
        self.red = [tower.psub(x_data, tower.pone())] + [
            tower.pscal(tower.pone(), -math.comb(p, i)) for i in range(1, p)
        ]
        self._h_pows = None
        self._d_pows = None
        self._trW = None

    # -- raw protocol --

    def root(self) -> Tower:
        return self.base

    def e_of(self, level: str) -> int:
        if level == L:
            return self.base.p * (self.base.p - 1)
        return self.base.e_of(level)

    def lzero(self):
        return [self.base.pzero() for _ in range(self.base.p)]

    def lone(self):
        return [self.base.pone()] + [self.base.pzero() for _ in range(self.base.p - 1)]

    def lfrom_p(self, a):
        return [list(map(list, a))] + [self.base.pzero() for _ in range(self.base.p - 1)]

    def wgen(self):
        z = self.lzero()
        z[1] = self.base.pone()
        return z

    def tgen(self):
        z = self.lzero()
        z[0] = self.base.pone()
        z[1] = self.base.pone()
        return z

    def ladd(self, a, b):
        return [self.base.padd(x, y) for x, y in zip(a, b)]

    def lsub(self, a, b):
        return [self.base.psub(x, y) for x, y in zip(a, b)]

    def lneg(self, a):
        return [self.base.pneg(x) for x in a]

    def lscal(self, a, n: int):
        return [self.base.pscal(x, n) for x in a]

    def lscal_p(self, a, pdata):
        return [self.base.pmul(x, pdata) for x in a]

    def lmul(self, a, b):
        tw = self.base
        p = tw.p
        out = [tw.pzero() for _ in range(2 * p - 1)]
        for i in range(p):
            ai = a[i]
            if any(any(c) for c in ai):
                for j in range(p):
                    bj = b[j]
                    if any(any(c) for c in bj):
                        out[i + j] = tw.padd(out[i + j], tw.pmul(ai, bj))
        for deg in range(2 * p - 2, p - 1, -1):
            c = out[deg]
            if any(any(x) for x in c):
                out[deg] = tw.pzero()
                for i in range(p):
                    out[deg - p + i] = tw.padd(out[deg - p + i], tw.pmul(c, self.red[i]))
        return out[:p]

    def lpow(self, a, n: int):
        result = self.lone()
        base = a
        while n:
            if n & 1:
                result = self.lmul(result, base)
            base = self.lmul(base, base)
            n >>= 1
        return result

    def lval(self, a) -> int | None:
        """Valuation in units of 1/(p(p-1)); exact by the W-adic expansion."""
        best = None
        for i, c in enumerate(a):
            v = self.base.pval(c)
            if v is not None:
                u = self.base.p * v + i
                best = u if best is None else min(best, u)
        return best

    def lresidue(self, a) -> list[int]:
        return self.base.presidue(a[0])

    def linv(self, a):
        tw = self.base
        res = self.lresidue(a)
        assert any(res), "not a unit in O_L"
        t = self.lfrom_p(tw.pfrom_k(tw.klift(tw._kresinv(res))))
        two = self.lfrom_p(tw.pfrom_k(tw.kfrom_int(2)))
        for _ in range(m_bits(tw.m) + 4):
            t = self.lmul(t, self.lsub(two, self.lmul(a, t)))
        assert self.lmul(a, t) == self.lone(), "inversion failed"
        return t

    # -- automorphisms --

    def _htables(self):
        if self._h_pows is None:
            tw = self.base
            hw = self.lzero()
            hw[0] = tw.psub(self.zeta, tw.pone())
            hw[1] = self.zeta
            pows = [self.lone()]
            for _ in range(tw.p - 1):
                pows.append(self.lmul(pows[-1], hw))
            self._h_pows = pows
        return self._h_pows

    def _dtables(self):
        if self._d_pows is None:
            tw = self.base
            t_mu = self.lpow(self.tgen(), self.mu)
            dw = self.lsub(t_mu, self.lone())
            pows = [self.lone()]
            for _ in range(tw.p - 1):
                pows.append(self.lmul(pows[-1], dw))
            self._d_pows = pows
        return self._d_pows

    def apply_h(self, a):
        """The Kprime-linear automorphism with T -> zeta*T."""
        pows = self._htables()
        out = self.lzero()
        for i, c in enumerate(a):
            if any(any(x) for x in c):
                out = self.ladd(out, self.lscal_p(pows[i], c))
        return out

    def twist_coeff(self, c):
        """gam -> mu*gam on a Kprime vector."""
        tw = self.base
        return [tw.kscal(c[j], self.mu_pows[j]) for j in range(tw.p - 1)]

    def apply_delta(self, a):
        """The K-automorphism of order p-1: T -> T^mu, gam -> mu*gam."""
        pows = self._dtables()
        out = self.lzero()
        for i, c in enumerate(a):
            if any(any(x) for x in c):
                out = self.ladd(out, self.lscal_p(pows[i], self.twist_coeff(c)))
        return out

    def trace_to_kprime(self, a):
        """Trace over the order-p group generated by h; lands in Kprime."""
        if self._trW is None:
            tw = self.base
            table = []
            for i in range(tw.p):
                s = self.lzero()
                for t in range(tw.p):
                    # h^t(W) = zeta^t (1+W) - 1, closed form
                    zt = tw.ppow(self.zeta, t)
                    ht_w = self.lzero()
                    ht_w[0] = tw.psub(zt, tw.pone())
                    ht_w[1] = zt
                    s = self.ladd(s, self.lpow(ht_w, i))
                for c in s[1:]:
                    if tw.pval(c) is not None and tw.pval(c) < (tw.m - 2) * (tw.p - 1):
                        raise PrecisionError("trace table entry not in Kprime")
                table.append(s[0])
            self._trW = table
        tw = self.base
        out = tw.pzero()
        for i, c in enumerate(a):
            out = tw.padd(out, tw.pmul(c, self._trW[i]))
        return out

    def norm_to_kprime(self, a):
        prod = self.lone()
        img = a
        for t in range(self.base.p):
            prod = self.lmul(prod, img) if t else [list(map(list, c)) for c in a]
            if t + 1 < self.base.p:
                img = self.apply_h(img)
        for c in prod[1:]:
            v = self.base.pval(c)
            if v is not None and v < (self.base.m - 2) * (self.base.p - 1):
                raise PrecisionError("norm does not lie in Kprime at precision")
        return prod[0]

    # -- raw dispatch protocol --

    def rzero(self, level):
        return self.lzero() if level == L else self.base.rzero(level)

    def rone(self, level):
        return self.lone() if level == L else self.base.rone(level)

    def radd(self, level, a, b):
        return self.ladd(a, b) if level == L else self.base.radd(level, a, b)

    def rsub(self, level, a, b):
        return self.lsub(a, b) if level == L else self.base.rsub(level, a, b)

    def rneg(self, level, a):
        return self.lneg(a) if level == L else self.base.rneg(level, a)

    def rmul(self, level, a, b):
        return self.lmul(a, b) if level == L else self.base.rmul(level, a, b)

    def rscal(self, level, a, n):
        return self.lscal(a, n) if level == L else self.base.rscal(level, a, n)

    def rval(self, level, a):
        return self.lval(a) if level == L else self.base.rval(level, a)

    def rinv(self, level, a):
        return self.linv(a) if level == L else self.base.rinv(level, a)


# ---------------------------------------------------------------------------
# Element-level convenience API


def elem_int(tower: Tower, level: str, n: int, ring=None) -> PadicElem:
    ring = ring or tower
    e = ring.rone(level)
    return PadicElem(ring, level, ring.rscal(level, e, n))


def gamma_elem(tower: Tower) -> PadicElem:
    return PadicElem(tower, KPRIME, tower.pgamma())


def embed(elem: PadicElem, level: str, ring=None) -> PadicElem:
    """Climb the tower: Qp -> K -> Kprime -> L (coordinate embeddings)."""
    order = [QP, K, KPRIME, L]
    tw = elem.ring.root()
    cur = elem
    while cur.level != level:
        i = order.index(cur.level)
        if i >= order.index(level):
            raise ValueError("can only embed upwards")
        nxt = order[i + 1]
        if nxt == K:
            data = tw.kfrom_int(cur.data)
            cur = PadicElem(tw, K, data, cur.shift, cur.prec)
        elif nxt == KPRIME:
            cur = PadicElem(tw, KPRIME, tw.pfrom_k(cur.data), cur.shift, cur.prec)
        else:
            if ring is None:
                raise ValueError("embedding into L needs the KummerTower")
            cur = PadicElem(ring, L, ring.lfrom_p(cur.data), cur.shift, cur.prec)
    return cur


def teichmuller(tower: Tower, coords: list[int]) -> PadicElem:
    """Teichmuller lift of a nonzero residue class into O_K."""
    return PadicElem(tower, K, tower.teichmuller_data(coords))


def frobenius(elem: PadicElem, i: int = 1) -> PadicElem:
    tw = elem.ring.root()
    if elem.level == K:
        return PadicElem(elem.ring, K, tw.frob(elem.data, i), elem.shift, elem.prec)
    if elem.level == KPRIME:
        return PadicElem(elem.ring, KPRIME, tw.pfrob(elem.data, i), elem.shift, elem.prec)
    if elem.level == QP:
        return elem
    raise ValueError("Frobenius acts on K or Kprime data")


def trace_norm(elem: PadicElem, pair: str, which: str = "trace") -> PadicElem:
    """Trace or norm along a supported level pair.

    Pairs: "K/Qp" (Frobenius orbit), "Kprime/Qp(zeta)" (Frobenius on
    K-coefficients), "L/Kprime" (orbit of T -> zeta*T).  The result is
    verified to lie in the lower ring; failure raises PrecisionError.
    """
    tw = elem.ring.root()
    if pair == "K/Qp":
        assert elem.level == K
        if which == "trace":
            out = tw.kzero()
            for i in range(tw.d):
                out = tw.kadd(out, tw.frob(elem.data, i))
        else:
            out = tw.kone()
            for i in range(tw.d):
                out = tw.kmul(out, tw.frob(elem.data, i))
        if any(c % tw.pm for c in out[1:]):
            raise PrecisionError("result does not lie in Qp at precision")
        shift = elem.shift if which == "trace" else elem.shift * tw.d
        return PadicElem(tw, QP, out[0], shift,
                         elem.prec if which == "trace" else elem.prec)
    if pair == "Kprime/Qp(zeta)":
        assert elem.level == KPRIME
        fn = tw.ptrace_to_zeta_field if which == "trace" else tw.pnorm_to_zeta_field
        out = fn(elem.data)
        shift = elem.shift if which == "trace" else elem.shift * tw.d
        return PadicElem(tw, KPRIME, out, shift, elem.prec)
    if pair == "L/Kprime":
        assert elem.level == L
        ring: KummerTower = elem.ring
        if which == "trace":
            out = ring.trace_to_kprime(elem.data)
            return PadicElem(tw, KPRIME, out, elem.shift, elem.prec)
        out = ring.norm_to_kprime(elem.data)
        return PadicElem(tw, KPRIME, out, elem.shift * tw.p, elem.prec)
    raise ValueError(f"unsupported pair {pair}")


def divide(a: PadicElem, b: PadicElem) -> PadicElem:
    """a / b at level K or Kprime, b distinguishable from zero.

    The divisor is factored as p-power times gam-power times unit (exactly,
    using gam^(p-1) = -p); the unit is inverted by Newton iteration.
    """
    tw = b.ring.root()
    v = b.val()
    if v is None:
        raise PrecisionError("division by an element indistinguishable from zero")
    if b.level == K:
        t = tw.rval(K, b.data)
        num = [x // tw.p**t for x in b.data]
        inv = PadicElem(b.ring, K, tw.kinv(num), t - b.shift)
    elif b.level == KPRIME:
        units = tw.pval(b.data)
        t, g = divmod(units, tw.p - 1)
        b1 = [[x // tw.p**t for x in c] for c in b.data]
        if g:
            gcompl = tw.pzero()
            gcompl[tw.p - 1 - g] = tw.kone()
            b1 = tw.pmul(b1, gcompl)
            u = [[x // tw.p for x in c] for c in tw.pneg(b1)]
            inv_raw = tw.pneg(tw.pmul(gcompl, tw.pinv(u)))
            inv = PadicElem(b.ring, KPRIME, inv_raw, t + 1 - b.shift)
        else:
            inv = PadicElem(b.ring, KPRIME, tw.pinv(b1), t - b.shift)
    else:
        raise ValueError("divide supports levels K and Kprime")
    inv.prec = b.prec - math.ceil(2 * v)
    inv.prec = min(inv.prec, tw.m - inv.shift)
    return a * inv


def pow_padic(a: PadicElem, mu: int, method: str = "auto") -> PadicElem:
    """(1 + (a-1))^mu for a p-adic integer exponent given by an integer
    representative; requires v(a - 1) > 0.

    method "binary" exponentiates directly (exact for the representative);
    "series" sums the binomial series of (1+X)^mu at X = a - 1 to the index
    where the tail drops below working precision.  "auto" picks binary.
    """
    one = PadicElem(a.ring, a.level, a.ring.rone(a.level))
    z = a - one
    vz = z.val()
    if vz is not None and vz <= 0:
        raise ValueError("pow_padic requires v(a-1) > 0")
    if method in ("auto", "binary"):
        if mu < 0:
            return pow_padic(a.inverse(), -mu, "binary")
        return a**mu
    if method != "series":
        raise ValueError("method must be auto, binary or series")
    tw = a.ring.root()
    if vz is None:
        return one
    nmax = math.ceil(Fraction(tw.m) / vz) + 2
    acc = one
    term_pow = one
    binom = 1
    for n in range(1, nmax + 1):
        binom = binom * (mu - (n - 1)) // n
        term_pow = term_pow * z
        acc = acc + term_pow * (binom % tw.pm)
    return acc
