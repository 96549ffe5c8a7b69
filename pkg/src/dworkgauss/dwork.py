"""The overconvergent exponential series E(X) = exp(gam*X - gam*X^p) with
gam^(p-1) = -p, its evaluation, and the Kummer units it defines.

Coefficients are computed exactly as rationals times powers of gam by the
Cauchy product of exp(gam X) and exp(-gam X^p), with every coefficient
certified against the valuation bound ord_p(e_n) >= n(p-1)/p^2.  E(1) is a
primitive p-th root of unity congruent to 1 + gam mod gam^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .tower import (
    K,
    KPRIME,
    PadicElem,
    Tower,
    embed,
    frobenius,
    pow_padic,
    teichmuller,
)


def _gamma_coeff_table(p: int, n: int) -> list[Fraction]:
    """Coefficient of X^n in E(X) as a vector over powers gam^j, j < p-1.

    Each entry is the exact rational c with the gam^j part equal to c*gam^j;
    powers gam^e for e >= p-1 are folded through gam^(p-1) = -p.
    """
    out = [Fraction(0)] * (p - 1)
    for m in range(n // p + 1):
        a = n - p * m
        e = a + m
        j, fold = e % (p - 1), e // (p - 1)
        c = Fraction((-1) ** m * (-p) ** fold, math.factorial(a) * math.factorial(m))
        out[j] += c
    return out


@dataclass
class DworkSeries:
    """Truncated coefficient list of E(X) with valuation certificates."""

    p: int
    digits: int
    truncation: int = field(init=False)
    coeffs: list[list[Fraction]] = field(init=False)

    def __post_init__(self):
        p, n_target = self.p, self.digits
        self.truncation = math.ceil(Fraction(n_target * p * p, p - 1)) + p * p
        self.coeffs = [_gamma_coeff_table(p, n) for n in range(self.truncation + 1)]
        for n, row in enumerate(self.coeffs):
            v = coeff_valuation(p, row)
            assert v is None or v >= Fraction(n * (p - 1), p * p), (
                f"coefficient {n} violates the valuation bound")
        self._cache: dict[int, list] = {}

    def materialized(self, tower: Tower) -> list:
        """Coefficient list as raw Kprime data over the given tower."""
        key = id(tower)
        if key not in self._cache:
            self._cache[key] = [fractions_to_kprime(tower, row) for row in self.coeffs]
        return self._cache[key]


def coeff_valuation(p: int, row: list[Fraction]) -> Fraction | None:
    """Exact valuation of sum_j row[j]*gam^j (None for zero)."""
    vals = []
    for j, c in enumerate(row):
        if c:
            num, den = c.numerator, c.denominator
            v = 0
            while num % p == 0:
                num //= p
                v += 1
            while den % p == 0:
                den //= p
                v -= 1
            vals.append(v + Fraction(j, p - 1))
    return min(vals) if vals else None


def fractions_to_kprime(tower: Tower, row: list[Fraction]):
    """Materialise an exact gam-power vector into Kprime data."""
    out = tower.pzero()
    for j, c in enumerate(row):
        if c:
            num, den = c.numerator, c.denominator
            assert den % tower.p != 0 or num % tower.p == 0, "non-integral coefficient"
            while den % tower.p == 0:  # cannot happen after the assert; safety
                den //= tower.p
                num //= tower.p
            val = num * pow(den, -1, tower.pm) % tower.pm
            out[j] = tower.kadd(out[j], tower.kscal(tower.kone(), val))
    return out


def dwork_coeffs(p: int, digits: int) -> DworkSeries:
    """Series coefficients certified to `digits` absolute p-digits on any
    argument of nonnegative valuation."""
    if p < 3:
        raise ValueError("p must be an odd prime")
    return DworkSeries(p, digits)


def dwork_eval(series: DworkSeries, u: PadicElem) -> PadicElem:
    """Evaluate the series at u, v(u) >= 0 required; Horner over Kprime."""
    tower = u.ring.root()
    if u.level == K:
        u = embed(u, KPRIME)
    assert u.level == KPRIME and u.shift == 0
    uv = u.val()
    if uv is not None and uv < 0:
        raise ValueError("series requires v(u) >= 0")
    mat = series.materialized(tower)
    acc = tower.pzero()
    for row in reversed(mat):
        acc = tower.padd(tower.pmul(acc, u.data), row)
    return PadicElem(tower, KPRIME, acc, 0, min(u.prec, series.digits))


def unity_root(series: DworkSeries, tower: Tower) -> PadicElem:
    """zeta = E(1): the canonical primitive p-th root of unity of Kprime.

    Checks zeta^p = 1, zeta != 1 mod gam^2 and 1 + zeta + ... + zeta^(p-1) = 0
    at working precision before returning.
    """
    one = PadicElem(tower, KPRIME, tower.pone())
    z = dwork_eval(series, one)
    p = tower.p
    zp = z**p
    if not (zp - one).is_zero_at(z.prec - 1):
        raise ArithmeticError("E(1)^p != 1 at precision")
    diff = z - one
    if diff.val() != Fraction(1, p - 1):
        raise ArithmeticError("E(1) is not a primitive p-th root (wrong valuation)")
    s = PadicElem(tower, KPRIME, tower.pzero())
    for t in range(p):
        s = s + z**t
    if not s.is_zero_at(z.prec - 1):
        raise ArithmeticError("1 + zeta + ... + zeta^(p-1) != 0 at precision")
    return z


def exp_series(z: PadicElem, terms: int | None = None) -> PadicElem:
    """exp(z) for v(z) > 1/(p-1), by direct summation of z^n/n!."""
    tower = z.ring.root()
    p = tower.p
    vz = z.val()
    assert vz is not None and vz > Fraction(1, p - 1), "exp requires v(z) > 1/(p-1)"
    if terms is None:
        # tail valuation n*v(z) - n/(p-1) >= m once n >= m / (v(z) - 1/(p-1))
        terms = math.ceil(Fraction(tower.m) / (vz - Fraction(1, p - 1))) + 2
    one = PadicElem(z.ring, z.level, z.ring.rone(z.level))
    acc = one
    zpow = one
    fact_unit = 1
    fact_val = 0
    for n in range(1, terms + 1):
        zpow = zpow * z
        nn = n
        while nn % p == 0:
            nn //= p
            fact_val += 1
        fact_unit = (fact_unit * nn) % tower.pm
        term = zpow * pow(fact_unit, -1, tower.pm)
        acc = acc + term.shifted(fact_val)
    return acc


def kummer_unit(series: DworkSeries, tower: Tower, u_coords: list[int],
                form: int = 2) -> PadicElem:
    """The unit x attached to the residue class with normal-basis coordinates
    u_coords (entries mod p, not all zero): the product over j of
    E(u_j * eta^(p^j)) with u_j lifted to {0} union mu_(p-1).

    form=2 evaluates at u_j*eta^(p^j) directly; form=1 raises E(eta^(p^j))
    to the Teichmuller power instead.  Both agree at precision.
    """
    p = tower.p
    if all(c % p == 0 for c in u_coords):
        raise ValueError("the zero class has no Kummer unit")
    acc = PadicElem(tower, KPRIME, tower.pone())
    for j, uj in enumerate(u_coords):
        if uj % p == 0:
            continue
        uj_lift = teichmuller_int(tower, uj)
        eta_j = frobenius(PadicElem(tower, K, tower.eta), j)
        if form == 2:
            arg = eta_j * uj_lift
            acc = acc * dwork_eval(series, arg)
        else:
            base = dwork_eval(series, eta_j)
            acc = acc * pow_padic(base, uj_lift)
    return acc


def teichmuller_int(tower: Tower, c: int) -> int:
    """Teichmuller lift of a nonzero residue of the prime field, as an int."""
    assert c % tower.p != 0
    t = c % tower.pm
    prev = None
    while t != prev:
        prev = t
        t = pow(t, tower.p, tower.pm)
    return t


def primitive_mu(tower: Tower) -> int:
    """The fixed primitive (p-1)-th root of unity in Zp: the Teichmuller
    lift of the smallest primitive root mod p, as an integer mod p^m."""
    p = tower.p
    for g in range(2, p):
        seen = {pow(g, k, p) for k in range(1, p)}
        if len(seen) == p - 1:
            return teichmuller_int(tower, g)
    raise AssertionError("no primitive root found")
