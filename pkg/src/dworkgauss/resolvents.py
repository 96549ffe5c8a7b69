"""Resolvents of the self-dual generator against the characters of the
order-p Galois group, their closed form, and the norm-resolvent exponent.

The character is normalised by chi(h) = zeta where h is the automorphism
T -> zeta*T; the resolvent sum of the generator then collapses, for
nontrivial chi^j, to the single conjugate T^(mu^s) with mu^s = j mod p.
The norm-resolvent is assembled from the verified closed form and the
verified norm of the Kummer unit, as a symbolic exponent of the p^2-th
root of unity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .extensions import WeakExtension
from .tower import PadicElem, PrecisionError, pow_padic, trace_norm


@dataclass(frozen=True)
class RootOfUnityExponent:
    """xi^e with the exponent e kept symbolically mod p^2."""

    p: int
    e: int

    def __mul__(self, other: "RootOfUnityExponent") -> "RootOfUnityExponent":
        assert self.p == other.p
        return RootOfUnityExponent(self.p, (self.e + other.e) % (self.p * self.p))

    def is_one(self) -> bool:
        return self.e % (self.p * self.p) == 0


def teichmuller_mod(g: int, p: int, modulus: int) -> int:
    """Teichmuller lift of g mod the given p-power modulus."""
    t = g % modulus
    prev = None
    while t != prev:
        prev = t
        t = pow(t, p, modulus)
    return t


def smallest_primitive_root(p: int) -> int:
    for g in range(2, p):
        if len({pow(g, k, p) for k in range(1, p)}) == p - 1:
            return g
    raise AssertionError("no primitive root")


def twist_exponent(p: int, j: int, mu_rep: int | None = None) -> tuple[int, int]:
    """(s, mu^s mod p^2) with mu^s = j mod p, mu the fixed Teichmuller
    primitive (p-1)-th root of unity; asserts the closed-form congruence
    mu^s = j(2 - j^(1-p)) mod p^2."""
    if not 1 <= j <= p - 1:
        raise ValueError("j must be a nonzero character exponent")
    p2 = p * p
    mu2 = (mu_rep if mu_rep is not None else
           teichmuller_mod(smallest_primitive_root(p), p, p2)) % p2
    s = next(s for s in range(p - 1) if pow(mu2, s, p2) % p == j % p)
    mus = pow(mu2, s, p2)
    j_1mp = pow(pow(j, p - 1, p2), -1, p2)
    assert mus == (j * (2 - j_1mp)) % p2, "twist congruence failed"
    return s, mus


def resolvent(wext: WeakExtension, j: int) -> PadicElem:
    """Character-twisted conjugate sum of the self-dual generator.

    For j = 0 the sum is 1.  For j != 0 it is computed definitionally as
    sum_t h^t(alpha) zeta^(-jt) and verified against the closed form
    T^(mu^s) (the latter through the binomial power); a mismatch at
    residual precision m-3 raises.
    """
    tower = wext.tower
    p = tower.p
    orbit = wext.h_orbit_alpha()
    acc = None
    for t in range(p):
        term = orbit[t] * wext.lift(wext.zeta_pow(-j * t))
        acc = term if acc is None else acc + term
    if j % p == 0:
        rhs = wext.one()
    else:
        s, _ = twist_exponent(p, j % p, wext.mu % (p * p))
        rhs = pow_padic(wext.T, pow(wext.mu, s, tower.pm))
    ok = (acc - rhs).residual() >= tower.m - 3
    if not ok:
        raise PrecisionError(f"resolvent closed form failed for j={j}")
    return acc


def resolvent_pair(wext: WeakExtension, j: int):
    """Both routes of the resolvent: (definitional sum, closed form,
    achieved agreement digits)."""
    tower = wext.tower
    p = tower.p
    orbit = wext.h_orbit_alpha()
    acc = None
    for t in range(p):
        term = orbit[t] * wext.lift(wext.zeta_pow(-j * t))
        acc = term if acc is None else acc + term
    if j % p == 0:
        rhs = wext.one()
    else:
        s, _ = twist_exponent(p, j % p, wext.mu % (p * p))
        rhs = pow_padic(wext.T, pow(wext.mu, s, tower.pm))
    return acc, rhs, (acc - rhs).residual()


def fourier_inversion_check(wext: WeakExtension) -> int:
    """Recover each conjugate of the generator from the resolvents:
    h^t(alpha) = (1/p) sum_j zeta^(jt) (alpha | chi^j).  Returns the worst
    agreement in digits."""
    tower = wext.tower
    p = tower.p
    res = [resolvent_pair(wext, j)[0] for j in range(p)]
    orbit = wext.h_orbit_alpha()
    worst = tower.m
    for t in range(p):
        acc = None
        for j in range(p):
            term = res[j] * wext.lift(wext.zeta_pow(j * t))
            acc = term if acc is None else acc + term
        recovered = acc.shifted(1)
        worst = min(worst, (recovered - orbit[t]).residual())
    return worst


def kummer_norm_check(wext: WeakExtension) -> tuple[bool, int]:
    """Norm of the Kummer unit down to Qp(zeta) equals zeta^Tr(eps);
    returns (ok at m-2 digits, achieved digits)."""
    tower = wext.tower
    x = wext.x
    nrm = trace_norm(x, "Kprime/Qp(zeta)", "norm")
    target = wext.zeta_pow(wext.eps.trace_mod_p)
    achieved = (nrm - target).residual()
    return achieved >= tower.m - 2, achieved


def norm_resolvent(wext: WeakExtension, j: int,
                   legs_verified: bool = False) -> RootOfUnityExponent:
    """Exponent of the norm-resolvent as a power of the p^2-th root of
    unity: mu^s * Tr(eps) mod p^2 for j != 0, with the transversal fixed so
    that the product of the conjugate roots is xi^Tr(eps).

    Requires both analytic legs (resolvent closed form and Kummer norm) to
    have been verified; pass legs_verified=True after doing so, otherwise
    they are re-checked here.
    """
    p = wext.tower.p
    if not legs_verified:
        resolvent(wext, j)
        ok, _ = kummer_norm_check(wext)
        if not ok:
            raise PrecisionError("kummer norm identity failed")
    if j % p == 0:
        return RootOfUnityExponent(p, 0)
    _, mus = twist_exponent(p, j % p, wext.mu % (p * p))
    return RootOfUnityExponent(p, (mus * wext.eps.trace_mod(p * p)) % (p * p))
