"""Enumeration of the degree-p wildly-and-weakly ramified extensions of the
unramified base, realized inside L = Kprime(x^(1/p)), together with the
self-dual generator of the square root of the inverse different and its
certification (Gram identity, lattice generation, different valuation).

The intermediate field M (fixed by delta) is never represented standalone:
all M-arithmetic happens in L with delta-invariance as the membership test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dwork import DworkSeries, kummer_unit, teichmuller_int
from .tower import (
    K,
    KPRIME,
    L,
    KummerTower,
    PadicElem,
    PrecisionError,
    Tower,
    divide,
    embed,
    gamma_elem,
    pow_padic,
)


@dataclass(frozen=True)
class EpsilonClass:
    """A residue unit class modulo the prime field, in normal basis
    coordinates, with its designated Teichmuller-coordinate lift."""

    index: int
    u_coords: tuple[int, ...]
    residue: tuple[int, ...]      # power basis coords of the class mod p
    trace_int: int                # trace of the lift, mod p^m
    trace_mod_p: int

    def trace_mod(self, modulus: int) -> int:
        return self.trace_int % modulus


def unit_classes(tower: Tower) -> list[EpsilonClass]:
    """The r = (p^d - 1)/(p - 1) classes of k^x modulo the prime field.

    Canonical representative: lexicographically smallest coordinate vector
    among the p-1 scalar multiples.
    """
    p, d = tower.p, tower.d
    reps = []
    seen = set()
    for code in range(1, p**d):
        coords = []
        c = code
        for _ in range(d):
            coords.append(c % p)
            c //= p
        coords = tuple(coords)
        if coords in seen:
            continue
        orbit = {tuple((s * x) % p for x in coords) for s in range(1, p)}
        seen |= orbit
        reps.append(min(orbit))
    reps.sort()
    out = []
    for idx, coords in enumerate(reps):
        lift = tower.kzero()
        res = [0] * d
        tr = 0
        for j, uj in enumerate(coords):
            if uj % p == 0:
                continue
            ujl = teichmuller_int(tower, uj)
            etaj = tower.frob(tower.eta, j)
            lift = tower.kadd(lift, tower.kscal(etaj, ujl))
            res = [(a + uj * b) % p for a, b in zip(res, tower.kresidue(etaj))]
            tr = (tr + ujl * tower.trace_eta()) % tower.pm
        assert tr == tower.ktrace(lift), "trace of lift mismatch"
        out.append(EpsilonClass(idx, coords, tuple(res), tr, tr % p))
    assert len(out) == (p**d - 1) // (p - 1), "wrong class count"
    return out


def eps_lift(tower: Tower, eps: EpsilonClass) -> PadicElem:
    """The designated O_K lift: Teichmuller coordinates against the
    Frobenius orbit of the tower generator."""
    lift = tower.kzero()
    for j, uj in enumerate(eps.u_coords):
        if uj % tower.p:
            lift = tower.kadd(lift, tower.kscal(tower.frob(tower.eta, j),
                                                teichmuller_int(tower, uj)))
    return PadicElem(tower, K, lift)


class WeakExtension:
    """One extension L = Kprime(x^(1/p)) for a designated unit class, with
    the order-p automorphism h (T -> zeta T), the order-(p-1) automorphism
    delta (T -> T^mu, mu the fixed Teichmuller primitive (p-1)-th root of
    unity), and the self-dual generator."""

    def __init__(self, tower: Tower, series: DworkSeries, zeta: PadicElem,
                 mu: int, eps: EpsilonClass):
        self.tower = tower
        self.series = series
        self.zeta = zeta
        self.mu = mu
        self.eps = eps
        self.x = kummer_unit(series, tower, list(eps.u_coords))
        one = PadicElem(tower, KPRIME, tower.pone())
        diff = self.x - one - gamma_elem(tower) * embed(eps_lift(tower, eps), KPRIME)
        dv = diff.val()
        if dv is not None and dv < Fraction(2, tower.p - 1):
            raise PrecisionError("kummer unit fails x = 1 + gam*eps mod gam^2")
        self.ext = KummerTower(tower, self.x.data, zeta.data, mu)
        self.T = PadicElem(self.ext, L, self.ext.tgen())
        self._delta_orbit_T = None
        self._alpha = None
        self._h_orbit_alpha = None
        self._zeta_pows = [tower.ppow(zeta.data, t) for t in range(tower.p)]
        self._pi_m = None

    # -- automorphism plumbing --

    def h(self, elem: PadicElem) -> PadicElem:
        assert elem.level == L
        return PadicElem(self.ext, L, self.ext.apply_h(elem.data), elem.shift, elem.prec)

    def delta(self, elem: PadicElem) -> PadicElem:
        assert elem.level == L
        return PadicElem(self.ext, L, self.ext.apply_delta(elem.data), elem.shift,
                         elem.prec)

    def zeta_pow(self, t: int) -> PadicElem:
        return PadicElem(self.tower, KPRIME, self._zeta_pows[t % self.tower.p])

    def lift(self, elem: PadicElem) -> PadicElem:
        return embed(elem, L, self.ext)

    def one(self) -> PadicElem:
        return PadicElem(self.ext, L, self.ext.lone())

    def order_checks(self) -> dict:
        """Verify the installed automorphisms on T: orders, the defining
        relation of delta(T), and that the two actions commute (the group
        they generate is abelian of order p(p-1): both come from abelian
        extensions of K)."""
        p = self.tower.p
        out = {}
        img = self.T
        for _ in range(p):
            img = self.h(img)
        out["h_order"] = (img - self.T).residual()
        img = self.T
        for _ in range(p - 1):
            img = self.delta(img)
        out["delta_order"] = (img - self.T).residual()
        dT = self.delta(self.T)
        xmu = pow_padic(self.x, self.mu)
        out["delta_T_pth_power"] = (dT**p - self.lift(xmu)).residual()
        out["commutation"] = (self.delta(self.h(self.T))
                              - self.h(self.delta(self.T))).residual()
        out["ok"] = all(v >= self.tower.m - 3 for k, v in out.items() if k != "ok")
        return out

    def group_faithful_check(self) -> bool:
        """The p(p-1) maps h^a delta^b take pairwise distinct values on T."""
        vals = []
        db = self.T
        for _ in range(self.tower.p - 1):
            img = db
            for _ in range(self.tower.p):
                vals.append(img)
                img = self.h(img)
            db = self.delta(db)
        thresh = self.tower.m - 3
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                if (vals[i] - vals[j]).is_zero_at(thresh):
                    return False
        return True

    def delta_orbit_T(self) -> list[PadicElem]:
        if self._delta_orbit_T is None:
            orbit = [self.T]
            for _ in range(self.tower.p - 2):
                orbit.append(self.delta(orbit[-1]))
            self._delta_orbit_T = orbit
        return self._delta_orbit_T

    def selfdual_generator(self) -> PadicElem:
        """(1 + sum of the delta-orbit of T) / p: the normal basis generator
        of the square root of the inverse different, inside L."""
        if self._alpha is None:
            num = self.one()
            for t in self.delta_orbit_T():
                num = num + t
            alpha = num.shifted(1)
            if (self.delta(alpha) - alpha).residual() < self.tower.m - 3:
                raise PrecisionError("generator is not delta-invariant")
            if alpha.val() != Fraction(-(self.tower.p - 1), self.tower.p):
                raise PrecisionError("generator has wrong valuation")
            self._alpha = alpha
        return self._alpha

    def h_orbit_alpha(self) -> list[PadicElem]:
        if self._h_orbit_alpha is None:
            orbit = [self.selfdual_generator()]
            for _ in range(self.tower.p - 1):
                orbit.append(self.h(orbit[-1]))
            self._h_orbit_alpha = orbit
        return self._h_orbit_alpha

    # -- certification --

    def gram_matrix(self, family: list[PadicElem] | None = None):
        """Gram matrix Tr(b_i b_j) over the h-orbit family (the trace over
        the order-p group, which restricts to the M/K trace on M).

        Returns (entries as K elements, worst deviation from the identity
        matrix in digits, membership-in-K ok).
        """
        tw = self.tower
        fam = family if family is not None else self.h_orbit_alpha()
        p = tw.p
        entries = [[None] * p for _ in range(p)]
        ok = True
        for i in range(p):
            for j in range(i, p):
                prod = fam[i] * fam[j]
                tr = PadicElem(tw, KPRIME, self.ext.trace_to_kprime(prod.data),
                               prod.shift, prod.prec)
                kelem, in_k = extract_k(tw, tr)
                ok = ok and in_k
                entries[i][j] = entries[j][i] = kelem
        worst = tw.m
        one = PadicElem(tw, K, tw.kone())
        zero = PadicElem(tw, K, tw.kzero())
        for i in range(p):
            for j in range(p):
                diff = entries[i][j] - (one if i == j else zero)
                worst = min(worst, diff.residual())
        return entries, worst, ok

    def uniformizer_m(self) -> PadicElem:
        """Delta-invariant uniformizer of M: product of the delta-orbit of
        T - 1 (valuation p-1 in L-units, i.e. 1 in M-units)."""
        if self._pi_m is None:
            one = self.one()
            prod = None
            for t in self.delta_orbit_T():
                factor = t - one
                prod = factor if prod is None else prod * factor
            if self.ext.lval(prod.data) != self.tower.p - 1:
                raise PrecisionError("uniformizer of M has wrong valuation")
            if (self.delta(prod) - prod).residual() < self.tower.m - 3:
                raise PrecisionError("uniformizer of M is not delta-invariant")
            self._pi_m = prod
        return self._pi_m

    def lattice_check(self, family: list[PadicElem] | None = None) -> dict:
        """Express the h-orbit of the generator over the O_K-basis
        pi_M^(t-(p-1)), t = 0..p-1, of the square root of the inverse
        different; pass iff all coordinates lie in O_K and the change of
        basis determinant is a unit.  The determinant valuation is reported
        as a witness either way."""
        tw = self.tower
        p = tw.p
        fam = family if family is not None else self.h_orbit_alpha()
        pim = self.uniformizer_m()
        pows = [self.one()]
        for _ in range(p - 1):
            pows.append(pows[-1] * pim)
        rows = []
        for f in fam:
            z = f * pows[p - 1]  # clear the pi^{-(p-1)} basis denominator
            coords = solve_kprime(self.ext, pows, z)
            if coords is None:
                return {"pass": False, "reason": "linear solve failed",
                        "det_valuation": None}
            rows.append(coords)
        kmat = []
        membership = True
        for row in rows:
            krow = []
            for c in row:
                kelem, in_k = extract_k(tw, c)
                membership = membership and in_k
                krow.append(kelem)
            kmat.append(krow)
        detv = k_det_valuation(tw, kmat)
        integral = all(e.val() is None or e.val() >= 0 for r in kmat for e in r)
        return {
            "pass": membership and integral and detv == 0,
            "membership": membership,
            "integral": integral,
            "det_valuation": detv,
        }

    def different_valuation(self) -> Fraction:
        """Valuation of the different of M/K in M-units, computed from the
        h-conjugates of the uniformizer of M."""
        pim = self.uniformizer_m()
        prod = None
        img = pim
        for _ in range(self.tower.p - 1):
            img = self.h(img)
            factor = pim - img
            prod = factor if prod is None else prod * factor
        units = self.ext.lval(prod.data)
        assert units is not None, "different valuation lost to precision"
        return Fraction(units, self.tower.p - 1)


def build_extension(tower: Tower, series: DworkSeries, zeta: PadicElem,
                    mu: int, eps: EpsilonClass) -> WeakExtension:
    """Build the extension for one class and verify the automorphism
    relations at working precision."""
    wext = WeakExtension(tower, series, zeta, mu, eps)
    checks = wext.order_checks()
    if not checks["ok"]:
        raise PrecisionError(f"automorphism order checks failed: {checks}")
    return wext


def extract_k(tower: Tower, elem: PadicElem) -> tuple[PadicElem, bool]:
    """Split off the K-component of a Kprime element and report whether the
    element lies in K at its claimed precision."""
    rest = [tower.kzero()] + [list(c) for c in elem.data[1:]]
    v = tower.pval(rest)
    in_k = v is None or Fraction(v, tower.p - 1) - elem.shift >= elem.prec
    return PadicElem(tower, K, list(elem.data[0]), elem.shift, elem.prec), in_k


def solve_kprime(ext: KummerTower, basis: list[PadicElem], rhs: PadicElem):
    """Solve rhs = sum_t c_t basis[t] over Kprime, where the basis elements
    and rhs live in L; Gaussian elimination with minimal-valuation pivots."""
    tw = ext.base
    p = tw.p
    mat = [[PadicElem(tw, KPRIME, [list(x) for x in basis[t].data[i]],
                      basis[t].shift, basis[t].prec) for t in range(p)]
           for i in range(p)]
    vec = [PadicElem(tw, KPRIME, [list(x) for x in rhs.data[i]], rhs.shift, rhs.prec)
           for i in range(p)]
    pivot_row_of_col: dict[int, int] = {}
    used: set[int] = set()
    for col in range(p):
        best, bestv = None, None
        for r in range(p):
            if r in used:
                continue
            v = mat[r][col].val()
            if v is not None and (bestv is None or v < bestv):
                best, bestv = r, v
        if best is None:
            return None
        used.add(best)
        pivot_row_of_col[col] = best
        for r in range(p):
            if r == best or mat[r][col].val() is None:
                continue
            factor = divide(mat[r][col], mat[best][col])
            for c2 in range(col, p):
                mat[r][c2] = mat[r][c2] - factor * mat[best][c2]
            vec[r] = vec[r] - factor * vec[best]
    sol: list[PadicElem | None] = [None] * p
    for col in reversed(range(p)):
        r = pivot_row_of_col[col]
        acc = vec[r]
        for c2 in range(col + 1, p):
            acc = acc - mat[r][c2] * sol[c2]
        if acc.val() is None:
            sol[col] = PadicElem(tw, KPRIME, tw.pzero(), 0, acc.prec)
        else:
            sol[col] = divide(acc, mat[r][col])
    return sol


def k_det_valuation(tower: Tower, mat: list[list[PadicElem]]) -> Fraction | None:
    """Valuation of the determinant of a K-matrix (None if it vanishes to
    working precision), by elimination with minimal-valuation pivots."""
    n = len(mat)
    work = [list(row) for row in mat]
    total = Fraction(0)
    used: set[int] = set()
    for col in range(n):
        best, bestv = None, None
        for r in range(n):
            if r in used:
                continue
            v = work[r][col].val()
            if v is not None and (bestv is None or v < bestv):
                best, bestv = r, v
        if best is None:
            return None
        used.add(best)
        total += bestv
        for r in range(n):
            if r in used or work[r][col].val() is None:
                continue
            factor = divide(work[r][col], work[best][col])
            for c2 in range(col, n):
                work[r][c2] = work[r][c2] - factor * work[best][c2]
    return total
