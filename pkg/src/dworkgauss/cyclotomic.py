"""Exact arithmetic in Z[xi], xi a primitive p^2-th root of unity.

Elements are integer coefficient vectors in the power basis
1, xi, ..., xi^(p(p-1)-1), reduced by the p^2-th cyclotomic polynomial
Phi(X) = 1 + X^p + X^(2p) + ... + X^(p(p-1)).  The p-th root of unity is
zeta = xi^p.  Everything here is exact; there is no rounding anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass


def _reduce(p: int, coeffs: list[int]) -> tuple[int, ...]:
    """Reduce an arbitrary-degree coefficient list modulo Phi_{p^2}."""
    n = p * (p - 1)
    work = list(coeffs)
    if len(work) < n:
        work += [0] * (n - len(work))
    # X^n = -(1 + X^p + ... + X^{(p-2)p}); eliminate top degrees first.
    for deg in range(len(work) - 1, n - 1, -1):
        c = work[deg]
        if c:
            work[deg] = 0
            for i in range(p - 1):
                work[deg - n + i * p] -= c
    return tuple(work[:n])


@dataclass(frozen=True)
class CycInt:
    """An element of Z[xi] with xi of order p^2."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        n = self.p * (self.p - 1)
        if len(self.coeffs) != n:
            raise ValueError(f"expected {n} coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_coeffs(cls, p: int, coeffs: list[int]) -> "CycInt":
        return cls(p, _reduce(p, coeffs))

    @classmethod
    def integer(cls, p: int, n: int) -> "CycInt":
        return cls.from_coeffs(p, [n])

    @classmethod
    def root_of_unity(cls, p: int, a: int) -> "CycInt":
        """xi^a, reduced; a multiple of p gives a power of zeta."""
        if p < 3:
            raise ValueError("p must be an odd prime >= 3")
        a %= p * p
        return cls.from_coeffs(p, [0] * a + [1])

    @classmethod
    def zeta_power(cls, p: int, t: int) -> "CycInt":
        return cls.root_of_unity(p, p * (t % p))

    def _check(self, other: "CycInt"):
        if self.p != other.p:
            raise ValueError("mismatched p")

    def __add__(self, other: "CycInt") -> "CycInt":
        self._check(other)
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CycInt") -> "CycInt":
        self._check(other)
        return CycInt(self.p, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycInt":
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, tuple(a * other for a in self.coeffs))
        self._check(other)
        n = len(self.coeffs)
        out = [0] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return CycInt(self.p, _reduce(self.p, out))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def galois(self, b: int) -> "CycInt":
        """Ring automorphism xi -> xi^b, for b coprime to p."""
        if b % self.p == 0:
            raise ValueError("b must be coprime to p")
        p2 = self.p * self.p
        out = [0] * (2 * p2)
        for i, c in enumerate(self.coeffs):
            if c:
                out[(i * b) % p2] += c
        return CycInt(self.p, _reduce(self.p, out))

    def conjugate(self) -> "CycInt":
        """Complex conjugation xi -> xi^{-1}."""
        return self.galois(-1)

    def divide_exact(self, n: int) -> "CycInt":
        """Divide by a rational integer; errors unless exact."""
        if any(c % n for c in self.coeffs):
            raise ArithmeticError(f"coefficients not divisible by {n}")
        return CycInt(self.p, tuple(c // n for c in self.coeffs))

    def as_root_of_unity(self) -> tuple[int, int] | None:
        """Return (sign, e) if self == sign * xi^e exactly, else None.

        Detection is by exhaustive comparison against all 2p^2 candidates.
        """
        for e in range(self.p * self.p):
            cand = CycInt.root_of_unity(self.p, e)
            if self.coeffs == cand.coeffs:
                return (1, e)
            if self.coeffs == (-cand).coeffs:
                return (-1, e)
        return None

    def __repr__(self):
        terms = [f"{c}*xi^{i}" for i, c in enumerate(self.coeffs) if c]
        return "CycInt(" + (" + ".join(terms) if terms else "0") + f"; p={self.p})"


def zeta_orthogonality(p: int, n: int) -> CycInt:
    """Sum of zeta^{t n} over t = 0..p-1 (p if p | n, else 0)."""
    total = CycInt.integer(p, 0)
    for t in range(p):
        total = total + CycInt.zeta_power(p, t * n)
    return total
