"""delta-eigenforms built from classical eigendata, and their decomposition."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional

from .deltaseries import DeltaSeries1, f_rel, hecke_delta
from .qseries import (CheckResult, EigenSystem, LaurentSeries, divisors,
                      eigen_check_classical, eigen_series, epsilon,
                      theta_inv_part, v_classical)
from .symmetry import NotSymmetric, ptp, structure_decompose


class EigenCheckFailed(ValueError):
    pass


class ReconstructionMismatch(ArithmeticError):
    pass


def default_n_list(p: int, prec: int) -> List[int]:
    top = min(20, prec // 2)
    return [n for n in range(2, top + 1) if n % p]


def sharp2(sys: EigenSystem, phi: LaurentSeries, verify: bool = False,
           n_list: Optional[Iterable[int]] = None) -> DeltaSeries1:
    """phi^(-1) - lambda_p V(phi) X + [kappa = 0] V^2(phi) X^p."""
    p = sys.p
    if verify:
        if n_list is None:
            n_list = default_n_list(p, phi.prec)
        res = eigen_check_classical(phi, sys, n_list)
        bad = [r.name for r in res if not r.passed]
        if bad:
            raise EigenCheckFailed(f"phi is not an eigenvector: {bad}")
    comps = {0: theta_inv_part(phi),
             1: v_classical(phi).scale(-sys.lambda_p)}
    if sys.kappa == 0:
        comps[p] = v_classical(phi, 2)
    return DeltaSeries1(p, comps)


def _truncated_frobenius_sum(base: DeltaSeries1, weights: List[int]) -> DeltaSeries1:
    """sum_i weights[i] F_rel^i(base)."""
    acc = None
    term = base
    for i, c in enumerate(weights):
        if i:
            term = f_rel(term)
        if c:
            piece = term.scale(c)
            acc = piece if acc is None else acc + piece
    if acc is None:
        acc = DeltaSeries1(base.p, {}, term.mprime_max)
    return acc


def sharp1(sys: EigenSystem, phi: LaurentSeries) -> DeltaSeries1:
    """sum_i lambda_p^(-i) F_rel^i(phi^#2), for kappa = 0 and lambda_p != 0.

    The partial sum up to I leaves a term at X^(p^(I+1)) that the next
    summand cancels; that component is kept only as 'zero up to the start of
    the dropped term'. I is chosen with p^(I+1) >= prec(phi^(-1)), so the
    order-0 part is complete at its precision.
    """
    p = sys.p
    if sys.kappa != 0 or sys.lambda_p == 0:
        raise ValueError("phi^#1 needs kappa = 0 and lambda_p != 0")
    base = sharp2(sys, phi)
    prec0 = base.component(0).prec
    I = 0
    while p ** (I + 1) < prec0:
        I += 1
    linv = pow(sys.lambda_p, -1, p)
    acc = _truncated_frobenius_sum(base, [pow(linv, i, p) for i in range(I + 1)])
    return _cut_spurious(acc, phi, I, p)


def _cut_spurious(acc: DeltaSeries1, phi: LaurentSeries, I: int, p: int) -> DeltaSeries1:
    key = p ** (I + 1)
    comps = dict(acc.comps)
    start = p ** (I + 2) * phi.valuation()
    comps[key] = LaurentSeries.zero(p, start)
    return DeltaSeries1(p, comps, acc.mprime_max)


def sharp1_alternative(sys: EigenSystem, phi: LaurentSeries) -> DeltaSeries1:
    """(sum_i lambda_p^(-i) V^i) phi^(-1) - lambda_p V(phi) X."""
    p = sys.p
    if sys.kappa != 0 or sys.lambda_p == 0:
        raise ValueError("phi^#1 needs kappa = 0 and lambda_p != 0")
    pm = theta_inv_part(phi)
    linv = pow(sys.lambda_p, -1, p)
    acc = pm
    i = 1
    while p ** i < pm.prec:
        acc = acc + v_classical(pm, i).scale(pow(linv, i, p))
        i += 1
    return DeltaSeries1(p, {0: acc, 1: v_classical(phi).scale(-sys.lambda_p)})


@dataclass
class DeltaCheckReport:
    results: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> List[dict]:
        return [r.to_json() for r in self.results]


def _series_prec(f: DeltaSeries1) -> int:
    return max((s.prec for s in f.comps.values()), default=0)


def eigen_check_delta(f: DeltaSeries1, sys: EigenSystem,
                      n_list: Optional[Iterable[int]] = None) -> DeltaCheckReport:
    """n T_kappa(n) f = lambda_n f for n in n_list, and "pT(p)" f = lambda_p f."""
    p = sys.p
    prof = structure_decompose(f)
    if prof is None or not prof.taylor:
        raise NotSymmetric("delta-eigenvectors must be Taylor symmetric")
    if n_list is None:
        f0 = f.component(0)
        n_list = default_n_list(p, f0.prec if f0 is not None else _series_prec(f))
    out = []
    for n in n_list:
        lhs = hecke_delta(f, n, sys.kappa, sys.N).scale(n)
        pr = _series_prec(lhs)
        if pr < 2:
            raise ValueError(f"precision too low to check n={n}")
        out.append(CheckResult(f"nT({n})", lhs.agrees(f.scale(sys.lambda_n(n))), pr))
    lhs = ptp(f, sys.kappa)
    out.append(CheckResult("pT(p)", lhs.agrees(f.scale(sys.lambda_p)), _series_prec(lhs)))
    return DeltaCheckReport(out)


def constant_allowed(sys: EigenSystem, n_list: Iterable[int]) -> bool:
    """Whether a nonzero constant can be a delta-eigenvector for sys."""
    p = sys.p
    if sys.lambda_p != (1 if sys.kappa == 0 else 0):
        return False
    for n in n_list:
        tot = sum(epsilon(A, sys.N) * pow(A, sys.kappa - 1, p) for A in divisors(n))
        if (sys.lambda_n(n) - n * tot) % p:
            return False
    return True


@dataclass
class SharpDecomposition:
    c: int
    c_list: List[int]
    phi: LaurentSeries
    tail_relation_verified: bool
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"c": self.c, "c_list": self.c_list,
                "phi": self.phi.to_json(),
                "tail_relation_verified": self.tail_relation_verified,
                "notes": self.notes}


def tail_next(sys: EigenSystem, c_prev: int) -> int:
    """c_i from c_{i-1} by [kappa = 0] c_{i-1} = lambda_p c_i (0 if lambda_p = 0)."""
    p = sys.p
    if sys.lambda_p == 0:
        return 0
    return (c_prev if sys.kappa == 0 else 0) * pow(sys.lambda_p, -1, p) % p


def reconstruct(sys: EigenSystem, phi: LaurentSeries, c: int, c_list: List[int],
                continue_tail: bool = True) -> DeltaSeries1:
    """c + (sum_i c_i F_rel^i) phi^#2, continuing c_i past the list by the tail relation.

    When kappa = 0 and lambda_p != 0 the continued tail is geometric and is
    summed as c_T F_rel^T(phi^#1) scaled to match.
    """
    p = sys.p
    base = sharp2(sys, phi)
    geometric = continue_tail and sys.kappa == 0 and sys.lambda_p != 0 and c_list
    if geometric:
        T = len(c_list) - 1
        head = _truncated_frobenius_sum(base, list(c_list[:T])) if T else None
        tail = sharp1(sys, phi).scale(c_list[T])
        for _ in range(T):
            tail = f_rel(tail)
        acc = tail if head is None else head + tail
    else:
        acc = _truncated_frobenius_sum(base, list(c_list))
    if c % p:
        f0 = acc.component(0)
        prec = f0.prec if f0 is not None else base.component(0).prec
        acc = acc + DeltaSeries1(p, {0: LaurentSeries(p, {0: c}, prec)})
    return acc


def decompose_eigenform(f: DeltaSeries1, sys: EigenSystem,
                        n_list: Optional[Iterable[int]] = None,
                        check: bool = True) -> SharpDecomposition:
    """Write f = c + (sum c_i F_rel^i) phi^#2 with phi normalized by gamma = 1."""
    p = sys.p
    if check:
        rep = eigen_check_delta(f, sys, n_list)
        if not rep.passed:
            raise EigenCheckFailed("input is not a delta-eigenvector")
    f0 = f.component(0)
    if f0 is None:
        raise ValueError("order-0 component missing")
    c = f0.coeff(0) if f0.prec > 0 else 0
    c_list = []
    i = 0
    while p ** i < f0.prec:
        c_list.append(f0.coeff(p ** i))
        i += 1
    if not c_list:
        raise ValueError("precision too low to extract c_0")
    notes = ["c_i beyond the stored range are continued by the tail relation"]
    # phi is only known as far as the eigenvalue table reaches
    phi_prec = min(f0.prec, sys.n_max + 1)
    if phi_prec < f0.prec:
        notes.append(f"phi truncated at q^{phi_prec} by the eigenvalue table")
    phi = eigen_series(sys, 1, phi_prec)
    rebuilt = reconstruct(sys, phi, c, c_list)
    if not rebuilt.agrees(f):
        raise ReconstructionMismatch("f differs from c + sum c_i F^i phi^#2")
    tail_ok = _tail_witnessed(f, sys, phi, len(c_list) - 1)
    if not tail_ok:
        notes.append("no component past the stored range was known; tail relation assumed")
    return SharpDecomposition(c % p, [x % p for x in c_list], phi, tail_ok, notes)


def _tail_witnessed(f: DeltaSeries1, sys: EigenSystem, phi: LaurentSeries, T: int) -> bool:
    """Whether f carries a known coefficient at X^(p^(T+1)), where the step
    c_T -> c_(T+1) of the tail relation shows up, so the match above covered it."""
    p = sys.p
    if sys.kappa > 0 and sys.lambda_p == 0:
        return True
    comp = f.component(p ** (T + 1))
    return comp is not None and comp.prec > p ** (T + 2) * phi.valuation()


def sharp1_frobenius_identity(sys: EigenSystem, phi: LaurentSeries) -> DeltaSeries1:
    """F_rel(phi^#1) - lambda_p phi^#1 + lambda_p phi^#2, which vanishes.

    On k((q)) the relative Frobenius is V; on delta-series it is the
    operator for which the geometric sum defining phi^#1 telescopes.
    """
    lp = sys.lambda_p
    s1 = sharp1(sys, phi)
    return f_rel(s1) - s1.scale(lp) + sharp2(sys, phi).scale(lp)


@dataclass
class CaseLabel:
    case: int
    basis: str

    def to_json(self) -> dict:
        return {"case": self.case, "basis": self.basis}


def classify_case(sys: EigenSystem) -> CaseLabel:
    if sys.kappa > 0 and sys.lambda_p == 0:
        return CaseLabel(1, "phi^(-1)")
    if sys.kappa == 0 and sys.lambda_p != 0:
        return CaseLabel(3, "phi^#1")
    return CaseLabel(2, "phi^#2")
