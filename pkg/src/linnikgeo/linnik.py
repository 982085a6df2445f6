"""Enumeration of the sets W_delta^(A,B,C) and their limit measure.

W consists of the reduced fractions m/n (n >= 1) in an interval I with
0 < A m^2 + B m n + C n^2 <= delta.  As delta grows these equidistribute
with respect to d_mu = dt / (A t^2 + B t + C) on I, with count
(3 delta / pi^2) mu(I) + lower order.  Everything here is case analysis on
the signs of A and D = B^2 - 4AC: those decide the shape of the positivity
region, the antiderivative of 1/F, and whether I may wrap through infinity.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    GuardExceeded,
    IntervalOutsidePositivityRegion,
    IntervalTouchesRoot,
    UnboundedDivergence,
    ZeroForm,
)
from .forms import RealForm

INF = math.inf

BRUTE_GUARD = 10**6

# candidate values this close to the cutoff delta are reported as boundary
# ties when the coefficients are not exact integers
TIE_REL = 1e-9


@dataclass(frozen=True)
class ProjInterval:
    """Subinterval of the projectively extended real line.

    wraps=True means the interval runs lo -> +inf, then continues from
    -inf -> hi.  Endpoints may be +-inf only in the non-wrapping case.
    """

    lo: float
    hi: float
    wraps: bool = False

    def __post_init__(self):
        if self.wraps:
            if math.isinf(self.lo) or math.isinf(self.hi):
                raise ValueError("wrapping interval needs finite endpoints")
        elif self.lo > self.hi:
            raise ValueError("need lo <= hi (pass wraps=True to go through inf)")

    def contains(self, t: float) -> bool:
        if self.wraps:
            return t >= self.lo or t <= self.hi
        return self.lo <= t <= self.hi

    def pieces(self) -> list[tuple[float, float]]:
        """The interval as one or two ordinary real intervals."""
        if self.wraps:
            return [(self.lo, INF), (-INF, self.hi)]
        return [(self.lo, self.hi)]


class Frac(NamedTuple):
    """Reduced fraction m/n with its float value cached."""

    m: int
    n: int
    t: float

    @classmethod
    def make(cls, m: int, n: int) -> "Frac":
        return cls(m, n, m / n)


@dataclass
class EnumReport:
    empirical: int
    predicted: float
    residual: float
    normalized_residual: float
    histogram: list[tuple[int, float]] = field(default_factory=list)
    max_ratio_dev: float = 0.0
    boundary_ties: int = 0


# ---------------------------------------------------------------------------
# sign cases and antiderivatives


def case_tag(F: RealForm) -> str:
    A, B = F.A, F.B
    D = F.discriminant()
    if A == 0 and B == 0:
        return "constant"
    if A == 0:
        return "linear"
    if A > 0:
        if D > 0:
            return "indefinite"
        if D < 0:
            return "definite"
        return "parabolic"
    if D > 0:
        return "cap"
    raise IntervalOutsidePositivityRegion(f"{F} is never positive")


def _roots(F: RealForm) -> tuple[float, float]:
    """Roots of F sorted increasingly (requires D >= 0, A != 0)."""
    sd = math.sqrt(F.discriminant())
    r1 = (-F.B - sd) / (2 * F.A)
    r2 = (-F.B + sd) / (2 * F.A)
    return min(r1, r2), max(r1, r2)


def _antiderivative(F: RealForm) -> tuple[Callable[[float], float], float, float]:
    """(H, H(+inf), H(-inf)) with H' = 1/F on the positivity region.

    Infinite limits are math.nan when the integral diverges there.
    """
    A, B, C = F.A, F.B, F.C
    D = F.discriminant()
    tag = case_tag(F)
    if tag == "constant":
        if C <= 0:
            raise IntervalOutsidePositivityRegion("constant form is nonpositive")
        return (lambda t: t / C), math.nan, math.nan
    if tag == "linear":
        return (lambda t: math.log(abs(B * t + C)) / B), math.nan, math.nan
    if tag == "indefinite":
        rm, rp = _roots(F)
        sd = math.sqrt(D)
        return (lambda t: math.log(abs((t - rp) / (t - rm))) / sd), 0.0, 0.0
    if tag == "definite":
        sd = math.sqrt(-D)
        lim = math.pi / sd
        return (lambda t: 2 / sd * math.atan((2 * A * t + B) / sd)), lim, -lim
    if tag == "parabolic":
        return (lambda t: -2 / (2 * A * t + B)), 0.0, 0.0
    # cap: A < 0, positive only between the roots
    rp, rm = (-F.B + math.sqrt(D)) / (2 * A), (-F.B - math.sqrt(D)) / (2 * A)
    sd = math.sqrt(D)
    return (lambda t: math.log((t - rp) / (rm - t)) / sd), math.nan, math.nan


def _check_interval(F: RealForm, I: ProjInterval) -> None:
    """Closure of I must stay inside {F > 0} and off the roots of F."""
    A = F.A
    D = F.discriminant()
    tag = case_tag(F)
    if I.wraps and A <= 0:
        raise IntervalOutsidePositivityRegion(
            "wrapping through infinity requires A > 0"
        )
    if tag == "constant":
        if F.C <= 0:
            raise IntervalOutsidePositivityRegion("constant form is nonpositive")
        return
    if tag == "linear":
        root = -F.C / F.B
        for e in (I.lo, I.hi):
            if e == root:
                raise IntervalTouchesRoot(f"endpoint {e} is the root of {F}")
        if F.value(I.lo) < 0 or F.value(I.hi) < 0:
            raise IntervalOutsidePositivityRegion(f"{I} leaves {{F > 0}} for {F}")
        return
    if tag == "definite":
        return
    if tag in ("indefinite", "parabolic"):
        rm, rp = _roots(F)
        for e in (I.lo, I.hi):
            if e == rm or e == rp:
                raise IntervalTouchesRoot(f"endpoint {e} is a root of {F}")
        for lo, hi in I.pieces():
            if lo < rm < hi or lo < rp < hi or (rm < lo and hi < rp):
                raise IntervalOutsidePositivityRegion(
                    f"{I} meets the nonpositive gap [{rm}, {rp}] of {F}"
                )
        return
    # cap
    rp, rm = sorted(_roots(F))
    for e in (I.lo, I.hi):
        if e == rp or e == rm:
            raise IntervalTouchesRoot(f"endpoint {e} is a root of {F}")
    if not (rp < I.lo and I.hi < rm):
        raise IntervalOutsidePositivityRegion(
            f"{I} must sit strictly inside ({rp}, {rm}) for {F}"
        )


def mu_integral(F: RealForm, I: ProjInterval) -> float:
    """Integral of dt / (A t^2 + B t + C) over I, in closed form."""
    if F.A == 0 and F.B == 0 and F.C == 0:
        raise ZeroForm("zero form has no measure")
    _check_interval(F, I)
    H, h_pinf, h_minf = _antiderivative(F)

    def H_at(t: float) -> float:
        if t == INF:
            if math.isnan(h_pinf):
                raise UnboundedDivergence(f"integral of 1/{F} diverges at +inf")
            return h_pinf
        if t == -INF:
            if math.isnan(h_minf):
                raise UnboundedDivergence(f"integral of 1/{F} diverges at -inf")
            return h_minf
        return H(t)

    if I.wraps:
        return (h_pinf - H(I.lo)) + (H(I.hi) - h_minf)
    return H_at(I.hi) - H_at(I.lo)


def predicted_count(F: RealForm, delta: float, I: ProjInterval) -> float:
    """Main term (3 delta / pi^2) mu(I) of #W_delta restricted to I."""
    if delta == 0:
        return 0.0
    return 3.0 * delta / math.pi**2 * mu_integral(F, I)


# ---------------------------------------------------------------------------
# exact enumeration


def _min_on_closure(F: RealForm, I: ProjInterval) -> float:
    """min of F over the closure of I (inf at infinite endpoints when A > 0)."""
    vals = []
    for e in (I.lo, I.hi):
        v = F.value(e)
        if not math.isinf(v):
            vals.append(v)
    if F.A != 0:
        vtx = -F.B / (2 * F.A)
        if I.contains(vtx):
            vals.append(F.value(vtx))
    if not vals:
        raise UnboundedDivergence(f"no finite minimum of {F} on {I}")
    return min(vals)


def _pos_leq_pieces(F: RealForm, K: float) -> list[tuple[float, float]]:
    """Bounded real intervals covering {t : 0 < F(t) <= K}."""
    A, B, C = F.A, F.B, F.C
    D = F.discriminant()
    if A == 0:
        # linear: between the root and the level-K point
        root = -C / B
        top = (K - C) / B
        return [(root, top)] if B > 0 else [(top, root)]
    disc = B * B - 4 * A * (C - K)
    if A > 0:
        if disc < 0:
            return []
        sd = math.sqrt(disc)
        r1, r2 = (-B - sd) / (2 * A), (-B + sd) / (2 * A)
        if D < 0:
            return [(r1, r2)]
        rm, rp = _roots(F)
        out = []
        if r1 < rm:
            out.append((r1, min(r2, rm)))
        if r2 > rp:
            out.append((max(r1, rp), r2))
        return out
    # A < 0: positive only between the roots of F
    rp, rm = sorted(_roots(F))
    if disc <= 0:
        return [(rp, rm)]
    sd = math.sqrt(disc)
    s1, s2 = (-B + sd) / (2 * A), (-B - sd) / (2 * A)
    return [(rp, s1), (s2, rm)]


def _intersect(
    a: list[tuple[float, float]], b: list[tuple[float, float]]
) -> list[tuple[float, float]]:
    out = []
    for a1, a2 in a:
        for b1, b2 in b:
            lo, hi = max(a1, b1), min(a2, b2)
            if lo <= hi:
                out.append((lo, hi))
    return out


def _scan_n_range(
    coeffs: tuple[float, float, float],
    integral: bool,
    delta: float,
    interval: tuple[float, float, bool],
    n_lo: int,
    n_hi: int,
) -> tuple[list[tuple[int, int]], int]:
    """All (m, n) with n in [n_lo, n_hi] meeting the constraints, plus tie count.

    Stand-alone (picklable) so worker processes can run it.
    """
    A, B, C = coeffs
    F = RealForm(A, B, C)
    I = ProjInterval(*interval)
    ipieces = I.pieces()
    if integral:
        A, B, C = int(A), int(B), int(C)
    pairs: list[tuple[int, int]] = []
    ties = 0
    for n in range(n_lo, n_hi + 1):
        K = delta / (n * n)
        pieces = _intersect(_pos_leq_pieces(F, K), ipieces)
        seen: set[int] = set()
        for plo, phi in pieces:
            m_lo = math.floor(n * plo) - 1
            m_hi = math.ceil(n * phi) + 1
            if m_hi < m_lo:
                continue
            ms = np.arange(m_lo, m_hi + 1, dtype=np.int64)
            big = max(abs(m_lo), abs(m_hi), n)
            if integral and (abs(A) + abs(B) + abs(C)) * big * big < 2**62:
                vals = A * ms * ms + B * ms * n + C * (n * n)
                ok = (vals > 0) & (vals <= delta)
            elif integral:
                vals = np.array(
                    [A * m * m + B * m * n + C * n * n for m in ms.tolist()],
                    dtype=object,
                )
                ok = ((vals > 0) & (vals <= delta)).astype(bool)
            else:
                vals = A * (ms * ms).astype(float) + B * ms.astype(float) * n + C * (
                    n * n
                )
                ok = (vals > 0) & (vals <= delta)
                ties += int((np.abs(vals - delta) < TIE_REL * delta).sum())
            ok &= np.gcd(ms, n) == 1
            for m in ms[ok].tolist():
                m = int(m)
                if m in seen or not I.contains(m / n):
                    continue
                seen.add(m)
                pairs.append((m, n))
    return pairs, ties


def _run_scan(
    coeffs: tuple[float, float, float],
    integral: bool,
    delta: float,
    interval: tuple[float, float, bool],
    n_max: int,
    workers: int | None,
) -> tuple[list[tuple[int, int]], int]:
    """Run _scan_n_range over 1..n_max, splitting across workers if asked."""
    nproc = min(_worker_count(workers), n_max)
    if nproc <= 1:
        return _scan_n_range(coeffs, integral, delta, interval, 1, n_max)
    # contiguous n-chunks; merge is order-independent since callers re-sort
    bounds = [1 + (n_max * k) // nproc for k in range(nproc + 1)]
    chunks = [(bounds[k], bounds[k + 1] - 1) for k in range(nproc)]
    pairs: list[tuple[int, int]] = []
    ties = 0
    with ProcessPoolExecutor(max_workers=nproc) as pool:
        futs = [
            pool.submit(_scan_n_range, coeffs, integral, delta, interval, a, b)
            for a, b in chunks
            if a <= b
        ]
        for fut in futs:
            p, t = fut.result()
            pairs.extend(p)
            ties += t
    return pairs, ties


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, int(os.environ.get("LINNIK_WORKERS", "1")))


def enumerate_W(
    F: RealForm,
    delta: float,
    I: ProjInterval,
    workers: int | None = None,
) -> list[Frac]:
    """All reduced m/n in I with 0 < F(m, n) <= delta, sorted along I.

    Membership is exact integer arithmetic when F has integer coefficients.
    Wrapping intervals sort lo -> +inf first, then -inf -> hi.
    """
    report = _enumerate_with_ties(F, delta, I, workers)
    return report[0]


def _enumerate_with_ties(
    F: RealForm,
    delta: float,
    I: ProjInterval,
    workers: int | None = None,
) -> tuple[list[Frac], int]:
    if delta <= 0:
        return [], 0
    _check_interval(F, I)
    minF = _min_on_closure(F, I)
    if minF <= 0:
        raise IntervalTouchesRoot(
            f"min of {F} on closure of {I} is {minF}; n-range would be infinite"
        )
    n_max = math.isqrt(math.floor(delta / minF))
    if n_max < 1:
        return [], 0
    if F.A == 0 and F.B == 0 and (math.isinf(I.lo) or math.isinf(I.hi)):
        raise UnboundedDivergence("constant form on an unbounded interval")
    pairs, ties = _run_scan(
        (F.A, F.B, F.C), F.is_integral(), delta, (I.lo, I.hi, I.wraps), n_max, workers
    )
    fracs = [Frac.make(m, n) for m, n in pairs]
    if I.wraps:
        fracs.sort(key=lambda f: (0, f.t) if f.t >= I.lo else (1, f.t))
    else:
        fracs.sort(key=lambda f: f.t)
    return fracs, ties


def brute_force_W(F: RealForm, delta: float, I: ProjInterval) -> list[Frac]:
    """Naive double-loop oracle for enumerate_W.  Guarded to delta <= 10^6."""
    if delta > BRUTE_GUARD:
        raise GuardExceeded(f"brute force refuses delta > {BRUTE_GUARD}")
    if delta <= 0:
        return []
    _check_interval(F, I)
    minF = _min_on_closure(F, I)
    if minF <= 0:
        raise IntervalTouchesRoot(f"min of {F} on closure of {I} is {minF}")
    n_max = math.isqrt(math.floor(delta / minF))
    # widest conceivable |t|: the interval itself when finite, otherwise the
    # extent of the level set F <= delta
    if not I.wraps and math.isfinite(I.lo) and math.isfinite(I.hi):
        T = max(abs(I.lo), abs(I.hi), 1.0)
    else:
        marks = [abs(e) for e in (I.lo, I.hi) if not math.isinf(e)]
        for plo, phi in _pos_leq_pieces(F, delta):
            marks += [abs(plo), abs(phi)]
        T = max(marks, default=1.0)
    integral = F.is_integral()
    A, B, C = (int(F.A), int(F.B), int(F.C)) if integral else (F.A, F.B, F.C)
    out = []
    for n in range(1, n_max + 1):
        M = math.ceil(n * T) + 1
        for m in range(-M, M + 1):
            if math.gcd(m, n) != 1:
                continue
            v = A * m * m + B * m * n + C * n * n
            if 0 < v <= delta and I.contains(m / n):
                out.append(Frac.make(m, n))
    if I.wraps:
        out.sort(key=lambda f: (0, f.t) if f.t >= I.lo else (1, f.t))
    else:
        out.sort(key=lambda f: f.t)
    return out


# ---------------------------------------------------------------------------
# equidistribution statistics


def _wrapped_height(F: RealForm, I: ProjInterval):
    """Monotone coordinate h on I with dh = d_mu, plus its range (h0, h1)."""
    H, h_pinf, h_minf = _antiderivative(F)
    if not I.wraps:
        lo = H(I.lo) if not math.isinf(I.lo) else (h_minf if I.lo < 0 else h_pinf)
        hi = H(I.hi) if not math.isinf(I.hi) else (h_pinf if I.hi > 0 else h_minf)
        if math.isnan(lo) or math.isnan(hi):
            raise UnboundedDivergence(f"measure of {I} under 1/{F} is infinite")
        return H, lo, hi
    jump = h_pinf - h_minf

    def h(t: float) -> float:
        return H(t) if t >= I.lo else H(t) + jump

    return h, H(I.lo), H(I.hi) + jump


def equid_report(
    F: RealForm,
    delta: float,
    I: ProjInterval,
    buckets: int,
    workers: int | None = None,
) -> EnumReport:
    """Compare the enumeration against the predicted count and bucket masses.

    I is split into `buckets` pieces of equal mu-mass (by the closed-form
    antiderivative, which is the monotone coordinate along I, including
    through the infinity seam of a wrapping interval).
    """
    if buckets < 2:
        raise ValueError("need at least 2 buckets")
    if delta <= 0:
        return EnumReport(0, 0.0, 0.0, 0.0, [(0, 0.0)] * buckets, 0.0, 0)
    _check_interval(F, I)
    fracs, ties = _enumerate_with_ties(F, delta, I, workers)
    mu_tot = mu_integral(F, I)
    predicted = 3.0 * delta / math.pi**2 * mu_tot
    empirical = len(fracs)
    residual = empirical - predicted
    h, h0, h1 = _wrapped_height(F, I)
    width = (h1 - h0) / buckets
    counts = [0] * buckets
    for f in fracs:
        j = int((h(f.t) - h0) / width)
        counts[min(max(j, 0), buckets - 1)] += 1
    mass = mu_tot / buckets
    if min(counts) > 0:
        dev = max(counts) / min(counts) - 1.0
    else:
        dev = math.inf if empirical else 0.0
    return EnumReport(
        empirical=empirical,
        predicted=predicted,
        residual=residual,
        normalized_residual=residual / delta**0.6,
        histogram=[(c, mass) for c in counts],
        max_ratio_dev=dev,
        boundary_ties=ties,
    )
