"""Truncated Laurent series over F_p and the classical operators on them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Dict, Iterable, List, Optional

from .fieldcore import FpElem, check_prime


def divisors(n: int) -> List[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class LaurentSeries:
    """sum c_e q^e for low <= e < prec, known modulo O(q^prec).

    Coefficients live in a sparse dict of nonzero residues mod p.
    """

    __slots__ = ("p", "low", "prec", "_c")

    def __init__(self, p: int, terms: Optional[Dict[int, int]] = None,
                 prec: int = 0, low: Optional[int] = None):
        self.p = p
        c = {}
        if terms:
            for e, a in terms.items():
                a %= p
                if a and e < prec:
                    c[e] = a
        self._c = c
        self.prec = prec
        if low is None:
            low = min(c) if c else prec
        elif c and min(c) < low:
            raise ValueError("nonzero coefficient below declared low")
        if low > prec:
            low = prec
        self.low = low

    # construction helpers

    @classmethod
    def zero(cls, p: int, prec: int) -> "LaurentSeries":
        return cls(p, {}, prec)

    @classmethod
    def monomial(cls, p: int, e: int, c: int = 1,
                 prec: Optional[int] = None) -> "LaurentSeries":
        if prec is None:
            prec = e + 1
        return cls(p, {e: c}, prec)

    @classmethod
    def from_dense(cls, p: int, low: int, coeffs: Iterable[int],
                   prec: Optional[int] = None) -> "LaurentSeries":
        coeffs = list(coeffs)
        if prec is None:
            prec = low + len(coeffs)
        return cls(p, {low + i: int(a) for i, a in enumerate(coeffs)}, prec, low)

    @classmethod
    def from_function(cls, p: int, fn: Callable[[int], int], low: int,
                      prec: int) -> "LaurentSeries":
        return cls(p, {e: fn(e) for e in range(low, prec)}, prec, low)

    # access

    def coeff(self, e: int) -> int:
        if e >= self.prec:
            raise IndexError(f"coefficient q^{e} beyond precision {self.prec}")
        return self._c.get(e, 0)

    def __getitem__(self, e: int) -> FpElem:
        return FpElem(self.coeff(e), self.p)

    def items(self):
        """Nonzero (exponent, residue) pairs in increasing exponent order."""
        return sorted(self._c.items())

    def terms(self) -> Dict[int, int]:
        return dict(self._c)

    def valuation(self) -> int:
        """Smallest exponent with nonzero coefficient (prec if none)."""
        return min(self._c) if self._c else self.prec

    def is_zero(self) -> bool:
        return not self._c

    def canonical(self) -> "LaurentSeries":
        return LaurentSeries(self.p, self._c, self.prec)

    def truncate(self, prec: int) -> "LaurentSeries":
        prec = min(prec, self.prec)
        return LaurentSeries(self.p, {e: a for e, a in self._c.items() if e < prec},
                             prec, min(self.low, prec))

    def dense(self) -> List[int]:
        return [self._c.get(e, 0) for e in range(self.low, self.prec)]

    # arithmetic

    def _same(self, other: "LaurentSeries"):
        if not isinstance(other, LaurentSeries):
            raise TypeError("expected LaurentSeries")
        if other.p != self.p:
            raise ValueError("mixing different primes")

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._same(other)
        prec = min(self.prec, other.prec)
        c = dict(self._c)
        for e, a in other._c.items():
            c[e] = c.get(e, 0) + a
        return LaurentSeries(self.p, c, prec, min(self.low, other.low, prec))

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.p, {e: -a for e, a in self._c.items()},
                             self.prec, self.low)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def scale(self, c: int) -> "LaurentSeries":
        c = int(c) % self.p
        return LaurentSeries(self.p, {e: a * c for e, a in self._c.items()},
                             self.prec, self.low)

    def __mul__(self, other):
        if isinstance(other, (int, FpElem)):
            return self.scale(int(other))
        self._same(other)
        va, vb = self.valuation(), other.valuation()
        prec = min(va + other.prec, vb + self.prec)
        c: Dict[int, int] = {}
        for e1, a1 in self._c.items():
            for e2, a2 in other._c.items():
                e = e1 + e2
                if e < prec:
                    c[e] = c.get(e, 0) + a1 * a2
        return LaurentSeries(self.p, c, prec, min(va + vb, prec))

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by q^k."""
        return LaurentSeries(self.p, {e + k: a for e, a in self._c.items()},
                             self.prec + k, self.low + k)

    def agrees(self, other: "LaurentSeries") -> bool:
        """Equality of coefficients below the smaller precision."""
        self._same(other)
        prec = min(self.prec, other.prec)
        keys = set(e for e in self._c if e < prec) | set(e for e in other._c if e < prec)
        return all(self._c.get(e, 0) == other._c.get(e, 0) for e in keys)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.p == other.p and self.agrees(other)

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"{a}*q^{e}" for e, a in self.items()) or "0"
        return f"{body} + O(q^{self.prec})"

    # serialization

    def to_json(self) -> dict:
        s = self.canonical()
        return {"p": s.p, "low": s.low, "prec": s.prec, "coeffs": s.dense()}

    @classmethod
    def from_json(cls, d: dict) -> "LaurentSeries":
        return cls.from_dense(int(d["p"]), int(d["low"]), d["coeffs"], int(d["prec"]))


# operators


def theta(f: LaurentSeries) -> LaurentSeries:
    return LaurentSeries(f.p, {e: e * a for e, a in f._c.items()}, f.prec, f.low)


def theta_inv_part(f: LaurentSeries) -> LaurentSeries:
    """sum over exponents prime to p of (a_n / n) q^n."""
    p = f.p
    return LaurentSeries(p, {e: a * pow(e, -1, p) for e, a in f._c.items() if e % p},
                         f.prec, f.low)


def u_classical(f: LaurentSeries) -> LaurentSeries:
    p = f.p
    return LaurentSeries(p, {e // p: a for e, a in f._c.items() if e % p == 0},
                         f.prec // p, _ceil_div(f.low, p))


def v_classical(f: LaurentSeries, times: int = 1) -> LaurentSeries:
    m = f.p ** times
    return LaurentSeries(f.p, {e * m: a for e, a in f._c.items()},
                         f.prec * m, f.low * m)


def epsilon(A: int, N: int) -> int:
    return 1 if gcd(A, N) == 1 else 0


def hecke_prec(prec: int, n: int) -> int:
    """Output precision of T(n): q^m reads q^(m n / A^2) for A | n.

    For prec > 0 the binding divisor is A = 1, for prec <= 0 it is A = n.
    """
    return prec // n if prec > 0 else prec * n


def hecke_classical(f: LaurentSeries, n: int, kappa: int, N: int) -> LaurentSeries:
    """T_kappa(n) with trivial character of level N, for n prime to p.

    Each term b q^e contributes A^(kappa-1) b q^(A e / D) for every
    factorization A D = n with gcd(A, N) = 1 and D | e.
    """
    p = f.p
    if n < 1 or n % p == 0:
        raise ValueError(f"Hecke index n={n} must be positive and prime to p={p}")
    prec = hecke_prec(f.prec, n)
    pairs = [(A, n // A, pow(A, kappa - 1, p)) for A in divisors(n) if gcd(A, N) == 1]
    c: Dict[int, int] = {}
    for e, b in f._c.items():
        for A, D, w in pairs:
            if e % D == 0:
                m = A * e // D
                if m < prec:
                    c[m] = c.get(m, 0) + w * b
    low = f.low * n if f.low < 0 else _ceil_div(f.low, n)
    return LaurentSeries(p, c, prec, min(low, prec))


# coefficient providers and eigen data


@dataclass
class CoeffProvider:
    """Integer Fourier coefficients a_1..a_{n_max}."""

    n_max: int
    fn: Callable[[int], int]
    label: str = ""
    _cache: Dict[int, int] = field(default_factory=dict, repr=False)

    def __call__(self, n: int) -> int:
        if n < 1 or n > self.n_max:
            raise IndexError(f"coefficient a_{n} outside available range 1..{self.n_max}")
        if n not in self._cache:
            self._cache[n] = int(self.fn(n))
        return self._cache[n]

    def values(self) -> List[int]:
        return [self(n) for n in range(1, self.n_max + 1)]

    @classmethod
    def from_list(cls, values: List[int], label: str = "list") -> "CoeffProvider":
        vals = [int(v) for v in values]
        return cls(len(vals), lambda n: vals[n - 1], label)

    @classmethod
    def from_file(cls, path: str) -> "CoeffProvider":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise ValueError("coefficient file must hold a JSON array a_1..a_nmax")
        return cls.from_list(data, label=path)


def divisor_sum_coeffs(N: int, n_max: int) -> CoeffProvider:
    """a_n = sum of divisors A of n with gcd(A, N) = 1."""
    if N < 5:
        raise ValueError("level N must be >= 5")

    def a(n: int) -> int:
        return sum(A for A in divisors(n) if gcd(A, N) == 1)

    return CoeffProvider(n_max, a, f"divisor-sum N={N}")


@dataclass
class EigenSystem:
    p: int
    N: int
    kappa: int
    lam: Dict[int, int]
    lambda_p: int

    def __post_init__(self):
        check_prime(self.p)
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        self.lam = {int(n): int(v) % self.p for n, v in self.lam.items()}
        self.lambda_p %= self.p

    def lambda_n(self, n: int) -> int:
        if n % self.p == 0:
            raise ValueError(f"lambda_{n} is not an away-from-p eigenvalue")
        if n not in self.lam:
            raise KeyError(f"missing eigenvalue lambda_{n}")
        return self.lam[n]

    @property
    def n_max(self) -> int:
        return max(self.lam) if self.lam else 0

    @classmethod
    def from_coeffs(cls, a: CoeffProvider, p: int, N: int, kappa: int,
                    n_max: Optional[int] = None) -> "EigenSystem":
        n_max = a.n_max if n_max is None else n_max
        lam = {n: a(n) % p for n in range(1, n_max + 1) if n % p}
        return cls(p, N, kappa, lam, a(p) % p)

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "kappa": self.kappa,
                "lambda": {str(n): v for n, v in sorted(self.lam.items())},
                "lambda_p": self.lambda_p}

    @classmethod
    def from_json(cls, d: dict) -> "EigenSystem":
        return cls(int(d["p"]), int(d["N"]), int(d["kappa"]),
                   {int(k): int(v) for k, v in d["lambda"].items()},
                   int(d["lambda_p"]))


def eigen_series(sys: EigenSystem, gamma: int, prec: int) -> LaurentSeries:
    """gamma * sum_{(n,p)=1} sum_{i>=0} lambda_n lambda_p^i q^(n p^i), 0^0 = 1."""
    p = sys.p
    if gamma % p == 0:
        raise ValueError("gamma must be nonzero")
    c: Dict[int, int] = {}
    for n in range(1, prec):
        if n % p == 0:
            continue
        ln = sys.lambda_n(n)
        e, lp = n, 1
        while e < prec:
            c[e] = gamma * ln * lp
            e *= p
            lp = lp * sys.lambda_p % p
    return LaurentSeries(p, c, prec, 1 if prec > 1 else prec)


@dataclass
class CheckResult:
    name: str
    passed: bool
    precision: int

    def to_json(self) -> dict:
        return {"check": self.name, "pass": self.passed, "precision": self.precision}


def eigen_check_classical(phi: LaurentSeries, sys: EigenSystem,
                          n_list: Iterable[int]) -> List[CheckResult]:
    """T_{kappa+2}(n) phi = lambda_n phi and U phi = lambda_p phi."""
    if phi.is_zero():
        raise ValueError("phi must be nonzero")
    out = []
    for n in n_list:
        lhs = hecke_classical(phi, n, sys.kappa + 2, sys.N)
        if lhs.prec < 2:
            raise ValueError(f"precision too low to check n={n}")
        out.append(CheckResult(f"T({n})", lhs.agrees(phi.scale(sys.lambda_n(n))), lhs.prec))
    lhs = u_classical(phi)
    if lhs.prec < 2:
        raise ValueError("precision too low to check U")
    out.append(CheckResult("U", lhs.agrees(phi.scale(sys.lambda_p)), lhs.prec))
    return out
