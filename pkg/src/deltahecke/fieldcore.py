"""Prime field elements, capped-precision p-adic numbers and delta of rationals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class PrecisionError(ArithmeticError):
    """Raised when a p-adic computation runs out of known digits or caps."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> None:
    if not isinstance(p, int) or p < 5 or not is_prime(p):
        raise ValueError(f"p must be a prime >= 5, got {p!r}")


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class FpElem:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return FpElem(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FpElem(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return FpElem(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return FpElem(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.value, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * fp_inv(FpElem(o, self.p))

    def __pow__(self, k: int):
        if k < 0:
            return fp_inv(self) ** (-k)
        return FpElem(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} mod {self.p}"


def fp_inv(x: FpElem) -> FpElem:
    if x.value == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {x.p}")
    return FpElem(pow(x.value, -1, x.p), x.p)


def delta_rational(A: int, D: int, p: int) -> FpElem:
    """delta(A/D) mod p, where delta(x) = (x - x^p)/p on rationals prime to p.

    Rationals are fixed by the Frobenius lift, so only x mod p^2 matters.
    """
    if A % p == 0 or D % p == 0:
        raise ValueError(f"A={A}, D={D} must both be prime to p={p}")
    p2 = p * p
    x = A * pow(D, -1, p2) % p2
    t = (x - pow(x, p, p2)) % p2
    return FpElem(t // p, p)


@dataclass(frozen=True)
class PadicNum:
    """p^valuation * unit, with the unit known mod p^relprec.

    Zero is represented by valuation None; absprec None means an exact zero,
    otherwise the value is only known to be 0 mod p^absprec.
    """

    p: int
    valuation: Optional[int]
    unit: int = 0
    relprec: int = 0
    M: int = 12
    maxdenom: int = 4
    zero_absprec: Optional[int] = None

    def __post_init__(self):
        if self.valuation is not None:
            if self.unit % self.p == 0:
                raise ValueError("unit must be prime to p")
            if self.relprec < 1:
                raise PrecisionError("no known digits")
            r = min(self.relprec, self.M)
            object.__setattr__(self, "relprec", r)
            object.__setattr__(self, "unit", self.unit % self.p ** r)
            if self.valuation < -self.maxdenom:
                raise PrecisionError(
                    f"valuation {self.valuation} below -{self.maxdenom}")

    # construction

    @classmethod
    def zero(cls, p: int, M: int = 12, maxdenom: int = 4, absprec=None):
        return cls(p, None, M=M, maxdenom=maxdenom, zero_absprec=absprec)

    @classmethod
    def from_int(cls, n: int, p: int, M: int = 12, maxdenom: int = 4):
        if n == 0:
            return cls.zero(p, M, maxdenom)
        v = vp(n, p)
        return cls(p, v, n // p ** v, M, M, maxdenom)

    @classmethod
    def from_rational(cls, num: int, den: int, p: int, M: int = 12,
                      maxdenom: int = 4):
        return cls.from_int(num, p, M, maxdenom) / cls.from_int(den, p, M, maxdenom)

    def _like(self, valuation, unit, relprec, zero_absprec=None):
        return PadicNum(self.p, valuation, unit, relprec, self.M,
                        self.maxdenom, zero_absprec)

    # precision

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def absprec(self) -> Optional[int]:
        if self.valuation is None:
            return self.zero_absprec
        return self.valuation + self.relprec

    def min_valuation(self):
        """Valuation, or the known lower bound for an inexact zero."""
        if self.valuation is None:
            return self.zero_absprec
        return self.valuation

    # arithmetic

    def _check(self, other: "PadicNum"):
        if not isinstance(other, PadicNum):
            raise TypeError("expected PadicNum")
        if other.p != self.p:
            raise ValueError("mixing different primes")

    def __add__(self, other: "PadicNum") -> "PadicNum":
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.M, self.maxdenom)
        self._check(other)
        if self.is_zero and self.zero_absprec is None:
            return other
        if other.is_zero and other.zero_absprec is None:
            return self
        caps = [a for a in (self.absprec, other.absprec)]
        absprec = min(caps)
        vals = [x.valuation for x in (self, other) if not x.is_zero]
        if not vals:
            return self._like(None, 0, 0, absprec)
        base = min(vals)
        if absprec <= base:
            return self._like(None, 0, 0, absprec)
        mod = self.p ** (absprec - base)
        s = 0
        for x in (self, other):
            if not x.is_zero:
                s += x.unit * self.p ** (x.valuation - base)
        s %= mod
        if s == 0:
            return self._like(None, 0, 0, absprec)
        k = vp(s, self.p)
        v = base + k
        return self._like(v, s // self.p ** k, absprec - v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return self._like(self.valuation, -self.unit, self.relprec)

    def __sub__(self, other):
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.M, self.maxdenom)
        return self + (-other)

    def __mul__(self, other: "PadicNum") -> "PadicNum":
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.M, self.maxdenom)
        self._check(other)
        if self.is_zero or other.is_zero:
            z, nz = (self, other) if self.is_zero else (other, self)
            if z.zero_absprec is None:
                return self._like(None, 0, 0, None)
            if nz.is_zero:
                if nz.zero_absprec is None:
                    return self._like(None, 0, 0, None)
                return self._like(None, 0, 0, z.zero_absprec + nz.zero_absprec)
            return self._like(None, 0, 0, z.zero_absprec + nz.valuation)
        r = min(self.relprec, other.relprec)
        return self._like(self.valuation + other.valuation,
                          self.unit * other.unit, r)

    __rmul__ = __mul__

    def __truediv__(self, other: "PadicNum") -> "PadicNum":
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.M, self.maxdenom)
        self._check(other)
        if other.is_zero:
            if other.zero_absprec is None:
                raise ZeroDivisionError("division by exact zero")
            raise PrecisionError("division by a value with no known digits")
        if self.is_zero:
            if self.zero_absprec is None:
                return self
            return self._like(None, 0, 0, self.zero_absprec - other.valuation)
        r = min(self.relprec, other.relprec)
        inv = pow(other.unit, -1, self.p ** r)
        return self._like(self.valuation - other.valuation,
                          self.unit * inv, r)

    def residue(self) -> FpElem:
        """Reduction mod p of an integral value."""
        if self.is_zero:
            if self.zero_absprec is not None and self.zero_absprec < 1:
                raise PrecisionError("value not known mod p")
            return FpElem(0, self.p)
        if self.valuation < 0:
            raise PrecisionError("value is not p-integral")
        if self.valuation > 0:
            return FpElem(0, self.p)
        return FpElem(self.unit, self.p)

    def to_rational_digits(self):
        """(valuation, unit) pair; (None, 0) for zero."""
        return self.valuation, self.unit

    def __eq__(self, other):
        """Equality up to the smaller absolute precision."""
        if isinstance(other, int):
            other = PadicNum.from_int(other, self.p, self.M, self.maxdenom)
        if not isinstance(other, PadicNum) or other.p != self.p:
            return NotImplemented
        d = self - other
        return d.is_zero

    def __hash__(self):
        return hash((self.p, self.valuation))

    def __repr__(self):
        if self.is_zero:
            return "0" if self.zero_absprec is None else f"O({self.p}^{self.zero_absprec})"
        return f"{self.p}^{self.valuation}*{self.unit} + O({self.p}^{self.absprec})"


def padic_arith(a: PadicNum, b: PadicNum, op: str) -> PadicNum:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
