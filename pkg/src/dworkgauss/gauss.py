"""Weakly ramified characters of the unramified base field and their Gauss
sums, computed two ways: the definitional character sum as an exact
cyclotomic integer, and the closed form as an explicit root of unity.

The character chi^j attached to an extension is pinned down by a unit v
(the character unit): chi^j(1 + up) = zeta^(-j Tr(u v)), chi trivial on
Teichmuller roots of unity and on p.  The kernel line of v is recovered
from genuine norm computations (class field theory), and its scale from
the trace pinning Tr(v) = Tr(eps); when Tr(eps) = 0 mod p the scale is
undetermined and all candidates are reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .cyclotomic import CycInt
from .extensions import WeakExtension, extract_k
from .residue import mat_nullspace, mat_rank
from .tower import K, KPRIME, PadicElem, PrecisionError, Tower


class CharacterUnitError(ArithmeticError):
    """The norm-subgroup computation did not produce a valid unit."""


@dataclass
class WeakCharacter:
    """chi^j given by the character unit v: conductor exponent 2 for
    j != 0, 0 for the trivial character; v_(chi^j) = j*v."""

    tower: Tower
    j: int
    v: list[int]  # K data of the pinned unit

    @property
    def conductor_exponent(self) -> int:
        return 0 if self.j % self.tower.p == 0 else 2


@dataclass
class CharacterPinning:
    """Outcome of the norm-kernel computation for one extension."""

    hyperplane: list[list[int]]     # basis of V mod p
    candidates: list[list[int]]     # pinned unit(s), trace = Tr(eps) exactly
    ambiguous: bool
    samples_used: int


# ---------------------------------------------------------------------------
# Character unit from norm computations


def _norm_sample_unit(wext: WeakExtension, a_coords: list[int]) -> list[int]:
    """Norm to K of the delta-symmetrised unit 1 + a*W, as K data."""
    tower = wext.tower
    ext = wext.ext
    a_lift = tower.teichmuller_data(a_coords) if any(
        c % tower.p for c in a_coords) else tower.kzero()
    z = ext.lone()
    z[1] = tower.pfrom_k(a_lift)
    prod = z
    img = z
    for _ in range(tower.p - 2):
        img = ext.apply_delta(img)
        prod = ext.lmul(prod, img)
    nrm = ext.norm_to_kprime(prod)
    kelem, in_k = extract_k(tower, PadicElem(tower, KPRIME, nrm))
    if not in_k:
        raise PrecisionError("norm of a symmetrised unit is not in K")
    return kelem.data


def _unit_log_coords(tower: Tower, n: list[int]) -> list[int]:
    """Coordinates mod p of u where n = omega(n) * (1 + up)."""
    res = tower.kresidue(n)
    assert any(res), "norm is not a unit"
    om = tower.teichmuller_data(res)
    w = tower.kmul(n, tower.kinv(om))
    diff = tower.ksub(w, tower.kone())
    assert all(c % tower.p == 0 for c in diff), "unit has nontrivial Teichmuller part"
    return [(c // tower.p) % tower.p for c in diff]


def _pin_trace(tower: Tower, v_res: list[int], target_tr: int) -> list[int]:
    """Lift the residue line element so its trace equals target exactly."""
    v = tower.klift(v_res)
    tr_v = tower.ktrace(v)
    delta = (target_tr - tr_v) % tower.pm
    assert delta % tower.p == 0, "trace pinning requires congruent traces"
    a = delta // tower.p  # known mod p^(m-1)
    tr_eta = tower.trace_eta()
    b = tower.kscal(tower.eta, a * pow(tr_eta, -1, tower.pm) % tower.pm)
    v = tower.kadd(v, tower.kscal(b, tower.p))
    assert (tower.ktrace(v) - target_tr) % (tower.pm // tower.p) == 0
    return v


def character_unit(wext: WeakExtension, rng: random.Random) -> CharacterPinning:
    """Compute the character unit from the norm subgroup of the extension.

    (a) sample norms of delta-symmetrised units, strip Teichmuller parts
    and collect the F_p-span V of their level-1 logarithms (expected
    dimension d-1); (b) solve Tr(u v) = 0 for all u in V for the line of
    v; (c) pin the scale by Tr(v) = Tr(eps), exactly lifted.  When
    Tr(eps) = 0 mod p every scaling on the line is returned, flagged
    ambiguous.
    """
    tower = wext.tower
    p, d = tower.p, tower.d
    samples: list[list[int]] = []
    vectors: list[list[int]] = []

    def feed(coords: list[int]):
        n = _norm_sample_unit(wext, coords)
        u = _unit_log_coords(tower, n)
        vectors.append(u)

    for l in range(d):
        feed([1 if i == l else 0 for i in range(d)])
        feed([(1 if i <= l else 0) for i in range(d)])
    tries = 0
    while mat_rank(vectors, p) < d - 1 and tries < 4 * d + 8:
        feed([rng.randrange(p) for _ in range(d)])
        tries += 1
    rank = mat_rank(vectors, p)
    if rank != d - 1:
        raise CharacterUnitError(f"norm subgroup has rank {rank}, expected {d - 1}")
    # reduce to a basis
    basis: list[list[int]] = []
    for vec in vectors:
        if mat_rank(basis + [vec], p) > len(basis):
            basis.append(vec)
    # trace form Gram matrix mod p
    gram = [[tower.ktrace(tower.kmul(_kbasis(tower, a), _kbasis(tower, b))) % p
             for b in range(d)] for a in range(d)]
    rows = [[sum(u[a] * gram[a][b] for a in range(d)) % p for b in range(d)]
            for u in basis]
    null = mat_nullspace(rows, p, d) if basis else [
        [1 if i == c else 0 for i in range(d)] for c in range(1)]
    if d == 1:
        null = [[1]]
    if len(null) != 1:
        raise CharacterUnitError(f"kernel line is {len(null)}-dimensional")
    v0 = null[0]
    tr_v0 = tower.ktrace(tower.klift(v0)) % p
    tr_eps = wext.eps.trace_mod_p
    if tr_eps % p != 0:
        if tr_v0 == 0:
            raise CharacterUnitError("trace vanishes on the kernel line but "
                                     "Tr(eps) != 0 mod p")
        c = tr_eps * pow(tr_v0, -1, p) % p
        v = _pin_trace(tower, [(c * a) % p for a in v0], wext.eps.trace_int)
        return CharacterPinning([list(b) for b in basis], [v], False, len(vectors))
    if tr_v0 % p != 0:
        raise CharacterUnitError("Tr(eps) = 0 mod p but the kernel line has "
                                 "nonzero trace")
    cands = [_pin_trace(tower, [(c * a) % p for a in v0], wext.eps.trace_int)
             for c in range(1, p)]
    return CharacterPinning([list(b) for b in basis], cands, True, len(vectors))


def _kbasis(tower: Tower, l: int) -> list[int]:
    return [1 if i == l else 0 for i in range(tower.d)]


def crosscheck_kernel(wext: WeakExtension, v: list[int], rng: random.Random,
                      count: int = 6) -> bool:
    """Fresh norm samples must satisfy Tr(u v) = 0 mod p."""
    tower = wext.tower
    for _ in range(count):
        coords = [rng.randrange(tower.p) for _ in range(tower.d)]
        n = _norm_sample_unit(wext, coords)
        u = _unit_log_coords(tower, n)
        tr = tower.ktrace(tower.kmul(tower.klift(u), v)) % tower.p
        if tr != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Character evaluation and Gauss sums


def chi_eval(char: WeakCharacter, a: PadicElem) -> CycInt:
    """Value of chi^j at a nonzero element of K: p-powers and Teichmuller
    parts contribute 1; the level-one part 1 + up contributes
    zeta^(-j Tr(u v))."""
    tower = char.tower
    p = tower.p
    v = a.val()
    if v is None:
        raise ValueError("cannot evaluate the character at 0")
    assert a.level == K
    t = int(v)
    assert v == t, "K valuations are integers"
    if a.prec - v < 2:
        raise PrecisionError("need at least two digits past the valuation")
    unit = [c // p ** (t + a.shift) for c in a.data]
    if char.j % p == 0:
        return CycInt.integer(p, 1)
    u = _strip_unit(tower, unit)
    tr = tower.ktrace(tower.kmul(u, char.v))
    return CycInt.zeta_power(p, (-char.j * tr) % p)


def _strip_unit(tower: Tower, unit: list[int]) -> list[int]:
    om = tower.teichmuller_data(tower.kresidue(unit))
    w = tower.kmul(unit, tower.kinv(om))
    diff = tower.ksub(w, tower.kone())
    assert all(c % tower.p == 0 for c in diff)
    return [c // tower.p for c in diff]


def gauss_sum(char: WeakCharacter, rng: random.Random | None = None) -> CycInt:
    """Definitional Galois Gauss sum as an exact cyclotomic integer.

    For conductor exponent 2 this is the q(q-1)-term sum over the classes
    omega(1+up) of chi(x) * psi(x/p^2), with psi the standard additive
    character (psi(x/p^2) = xi^Tr(x) with the exponent mod p^2).  The
    trivial character gives 1.  Passing an rng re-randomises the choice of
    representatives (the sum must not change)."""
    tower = char.tower
    p, d, q = tower.p, tower.d, tower.q
    if char.j % p == 0:
        return CycInt.integer(p, 1)
    p2 = p * p
    # Teichmuller lifts of the residue classes
    teich: list[list[int]] = []
    for code in range(1, q):
        coords = []
        c = code
        for _ in range(d):
            coords.append(c % p)
            c //= p
        teich.append(tower.teichmuller_data(coords))
    # representatives u of O_K/p: integer combinations of the Teichmuller
    # basis (Frobenius orbit of the generator)
    basis = [tower.frob(tower.eta, i) for i in range(d)]
    total = CycInt.integer(p, 0)
    for code in range(q):
        coords = []
        c = code
        for _ in range(d):
            coords.append(c % p)
            c //= p
        u = tower.kzero()
        for cj, b in zip(coords, basis):
            u = tower.kadd(u, tower.kscal(b, cj))
        if rng is not None:
            u = tower.kadd(u, tower.kscal([rng.randrange(tower.pm)
                                           for _ in range(d)], p))
        chi_exp = (-char.j * tower.ktrace(tower.kmul(u, char.v))) % p
        one_up = tower.kadd(tower.kone(), tower.kscal(u, p))
        for om in teich:
            x = tower.kmul(om, one_up)
            xi_exp = (p * chi_exp + tower.ktrace(x)) % p2
            total = total + CycInt.root_of_unity(p, xi_exp)
    return total


def conjugate_product(tau: CycInt) -> CycInt:
    """tau times its complex conjugate (xi -> xi^(-1))."""
    return tau * tau.conjugate()


def modified_gauss_sum(char: WeakCharacter) -> CycInt:
    """Modified Gauss sum: the trivial character maps to -1; a ramified
    chi^j maps to tau(chi^j) * chi^j(c) with c = p^2/(4v)."""
    tower = char.tower
    if char.j % tower.p == 0:
        return CycInt.integer(tower.p, -1)
    tau = gauss_sum(char)
    inv4v = tower.kinv(tower.kscal(char.v, 4))
    chi_c = chi_eval(char, PadicElem(tower, K, inv4v))
    return tau * chi_c


def modified_twisted_gauss_sum(char: WeakCharacter) -> CycInt:
    """tau*(chi^j - chi^(2j)): quotient of the modified sums, computed by
    exact division in Z[xi] (multiply by the conjugate, divide by p^(2d));
    equals 1 for the trivial character."""
    tower = char.tower
    p = tower.p
    if char.j % p == 0:
        return CycInt.integer(p, 1)
    j2 = (2 * char.j) % p
    assert j2 != 0
    num = modified_gauss_sum(char)
    den = modified_gauss_sum(WeakCharacter(tower, j2, char.v))
    mag = den * den.conjugate()
    expected = CycInt.integer(p, p ** (2 * tower.d))
    if mag.coeffs != expected.coeffs:
        raise ArithmeticError("Gauss sum magnitude is not p^(2d)")
    quotient = (num * den.conjugate()).divide_exact(p ** (2 * tower.d))
    if (quotient * den).coeffs != num.coeffs:
        raise ArithmeticError("inexact division in the twisted quotient")
    return quotient


def gauss_sum_closed_form(char: WeakCharacter, tr_eps_mod_p2: int) -> CycInt:
    """chi^j(j^(-1)) * xi^(-j Tr(eps)), the closed form of the modified
    twisted Gauss sum."""
    tower = char.tower
    p = tower.p
    if char.j % p == 0:
        return CycInt.integer(p, 1)
    jinv = pow(char.j, -1, tower.pm)
    chi_val = chi_eval(char, PadicElem(tower, K, tower.kfrom_int(jinv)))
    xi_part = CycInt.root_of_unity(p, (-char.j * tr_eps_mod_p2) % (p * p))
    return chi_val * xi_part


def conductor_checks(char: WeakCharacter, rng: random.Random) -> bool:
    """chi^j is trivial on 1 + p^2 O_K and (for j != 0) nontrivial on
    1 + p O_K."""
    tower = char.tower
    p = tower.p
    one = CycInt.integer(p, 1)
    for _ in range(4):
        w = [rng.randrange(tower.pm) for _ in range(tower.d)]
        a = PadicElem(tower, K, tower.kadd(tower.kone(),
                                           tower.kscal(w, p * p)))
        if chi_eval(char, a).coeffs != one.coeffs:
            return False
    if char.j % p == 0:
        return True
    nontrivial = False
    for l in range(tower.d):
        a = PadicElem(tower, K, tower.kadd(tower.kone(),
                                           tower.kscal(_kbasis(tower, l), p)))
        if chi_eval(char, a).coeffs != one.coeffs:
            nontrivial = True
    return nontrivial
