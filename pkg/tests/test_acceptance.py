"""Acceptance battery: one printed pass/fail line per criterion.

Each test evaluates a headline claim at desk scale against either an exact
oracle or the explicit main term, with tolerances fixed up front.  Numeric
thresholds are stated inline; a failure here means the library no longer
reproduces the mathematics, not a flaky tolerance.
"""

import math
import random
import time

import mpmath
import numpy as np
from scipy.integrate import quad

from linnikgeo.cycles import (
    CONSTANT_ONE,
    J_FUNCTION,
    closed_geodesic,
    cm_count_closed,
    cycle_value,
)
from linnikgeo.forms import IntForm
from linnikgeo.geodesic_enum import (
    enum_cm_in_ball,
    enum_cm_on_geodesic,
    enum_cm_on_im1,
    enum_rm_through_point,
)
from linnikgeo.hyperbolic import PointH, ang_p, ball, dist, sector_area
from linnikgeo.linnik import (
    ProjInterval,
    RealForm,
    brute_force_W,
    enumerate_W,
    predicted_count,
    _min_on_closure,
)
from linnikgeo.numtheory import (
    PhiTable,
    _pell_one,
    is_fundamental_discriminant,
    pell_fundamental,
    phi_sieve,
    sum_phi,
    sum_phi_over_n,
    weighted_sqrt_sum,
)

INF = float("inf")


def _line(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {num}: {detail}"


BATTERY = [
    (RealForm(0, 1, 0), ProjInterval(1, 2)),
    (RealForm(0, -1, 3), ProjInterval(-2, 2)),
    (RealForm(1, 0, -1), ProjInterval(2, 3)),
    (RealForm(1, 0, 1), ProjInterval(0, 1)),
    (RealForm(1, 0, 1), ProjInterval(-INF, INF)),
    (RealForm(1, 2, 1), ProjInterval(1, 4)),
    (RealForm(-1, 0, 1), ProjInterval(-0.5, 0.5)),
]


def test_acceptance_1_battery_counts():
    delta = 10**6
    bound = math.sqrt(delta) * math.log(delta) ** 2
    worst = 0.0
    slowest = 0.0
    for F, I in BATTERY:
        t0 = time.perf_counter()
        emp = len(enumerate_W(F, delta, I, workers=1))
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        norm = abs(emp - predicted_count(F, delta, I)) / bound
        worst = max(worst, norm)
        assert elapsed < 30.0, f"{F} on {I}: {elapsed:.1f}s"
    # small-scale exact oracle for every battery member
    for F, I in BATTERY:
        got = [(f.m, f.n) for f in enumerate_W(F, 10**4, I)]
        ref = [(f.m, f.n) for f in brute_force_W(F, 10**4, I)]
        assert got == ref, f"oracle mismatch for {F} on {I}"
    _line(
        1,
        worst <= 10.0,
        f"battery of {len(BATTERY)}: worst residual/(sqrt(d) log^2 d) = "
        f"{worst:.4g} (tol 10), slowest case {slowest:.2f}s, "
        f"exact oracle match at 1e4",
    )


def _random_instance(rng: random.Random, kind: str):
    if kind == "linear+":
        B, C = rng.randint(1, 6), rng.randint(-5, 5)
        root = -C / B
        lo = root + rng.uniform(0.2, 1.5)
        return RealForm(0, B, C), ProjInterval(lo, lo + rng.uniform(0.5, 3.0))
    if kind == "linear-":
        B, C = -rng.randint(1, 6), rng.randint(-5, 5)
        root = -C / B
        hi = root - rng.uniform(0.2, 1.5)
        return RealForm(0, B, C), ProjInterval(hi - rng.uniform(0.5, 3.0), hi)
    if kind == "indefinite":
        while True:
            A, B, C = rng.randint(1, 4), rng.randint(-5, 5), rng.randint(-5, -1)
            D = B * B - 4 * A * C
            rp = (-B + math.sqrt(D)) / (2 * A)
            rm = (-B - math.sqrt(D)) / (2 * A)
            if rng.random() < 0.3:
                # wrapped window through infinity, clear of both roots
                return RealForm(A, B, C), ProjInterval(
                    rp + rng.uniform(0.3, 1.0), rm - rng.uniform(0.3, 1.0), True
                )
            lo = rp + rng.uniform(0.2, 1.0)
            return RealForm(A, B, C), ProjInterval(lo, lo + rng.uniform(0.5, 3.0))
    if kind == "definite":
        A, B = rng.randint(1, 4), rng.randint(-5, 5)
        C = B * B // (4 * A) + rng.randint(1, 5)
        if rng.random() < 0.3:
            lo = rng.uniform(0.5, 3.0)
            return RealForm(A, B, C), ProjInterval(lo, -lo, True)
        lo = rng.uniform(-4.0, 1.0)
        return RealForm(A, B, C), ProjInterval(lo, lo + rng.uniform(0.5, 4.0))
    if kind == "parabolic":
        a, b = rng.randint(1, 3), rng.randint(-3, 3)
        root = -b / a
        lo = root + rng.uniform(0.2, 1.5)
        return RealForm(a * a, 2 * a * b, b * b), ProjInterval(
            lo, lo + rng.uniform(0.5, 3.0)
        )
    # cap
    a, b, c = -rng.randint(1, 3), rng.randint(-3, 3), rng.randint(1, 5)
    D = b * b - 4 * a * c
    rp = (-b + math.sqrt(D)) / (2 * a)
    rm = (-b - math.sqrt(D)) / (2 * a)
    w = rm - rp
    return RealForm(a, b, c), ProjInterval(rp + 0.15 * w, rm - 0.15 * w)


def test_acceptance_2_oracle_equivalence():
    rng = random.Random(2024)
    kinds = ["linear+", "linear-", "indefinite", "definite", "parabolic", "cap"]
    checked = 0
    nonempty = 0
    while checked < 200:
        F, I = _random_instance(rng, kinds[checked % 6])
        delta = rng.uniform(1, 10**4)
        # keep the naive oracle's double loop near 5e4 iterations
        minF = _min_on_closure(F, I)
        T = max(abs(e) for e in (I.lo, I.hi) if math.isfinite(e))
        work = max(T, 1.0) * delta / minF
        if work > 5e4:
            delta *= 5e4 / work
        got = {(f.m, f.n) for f in enumerate_W(F, delta, I)}
        ref = {(f.m, f.n) for f in brute_force_W(F, delta, I)}
        assert got == ref, f"{F} on {I} at delta={delta}"
        checked += 1
        nonempty += bool(ref)
    _line(
        2,
        checked == 200,
        f"enumerate_W == brute_force_W on 200 random instances "
        f"({nonempty} nonempty), exact set equality",
    )


def _bucket_dev(us: list[float], lo: float, hi: float, buckets: int) -> float:
    counts, _ = np.histogram(us, bins=buckets, range=(lo, hi))
    return counts.max() / counts.min() - 1.0


def test_acceptance_3_geodesic_equidistribution():
    results = []
    for G, arc, to_u in (
        (IntForm(1, 0, -1), (0.5, math.pi - 0.5), lambda c: math.log(math.tan(c / 2))),
        (IntForm(0, 1, 0), (1.0, math.e), math.log),
    ):
        devs = []
        for delta in (10**4, 10**6):
            recs = enum_cm_on_geodesic(G, delta, arc=arc)
            us = [to_u(r.coord) for r in recs]
            devs.append(_bucket_dev(us, to_u(arc[0]), to_u(arc[1]), 8))
        assert devs[1] < devs[0], f"{G}: no improvement {devs}"
        results.append(devs[1])
    ok = all(d <= 0.03 for d in results)
    _line(
        3,
        ok,
        f"8 equal-mass buckets at 1e6: ratio dev {results[0]:.4g} (semicircle), "
        f"{results[1]:.4g} (half-line), tol 3%, both below the 1e4 value",
    )


def test_acceptance_4_angle_equidistribution():
    recs = enum_rm_through_point(IntForm(1, 0, 1), 10**6)
    counts, _ = np.histogram([r.angle for r in recs], bins=8, range=(0.0, math.pi))
    mean = counts.mean()
    dev = float(np.abs(counts - mean).max() / mean)
    _line(
        4,
        dev <= 0.03,
        f"RM curves through i, {len(recs)} curves, 8 uniform-angle buckets: "
        f"max deviation from mean {dev:.4g} (tol 3%)",
    )


def test_acceptance_5_ball_trend():
    z0 = PointH(0, 1)
    chis = []
    for D in (-10003, -100003, -1000003):
        assert is_fundamental_discriminant(D)
        recs = enum_cm_in_ball(z0, 1.0, D=D)
        counts, _ = np.histogram([r.angle for r in recs], bins=8,
                                 range=(0.0, 2 * math.pi))
        expected = counts.sum() / 8
        chis.append(float(((counts - expected) ** 2 / expected).sum()))
    ok = chis[0] > chis[1] > chis[2]
    _line(
        5,
        ok,
        f"angular chi^2 at D = -10003, -100003, -1000003: "
        f"{chis[0]:.3g} > {chis[1]:.3g} > {chis[2]:.3g}",
    )


def test_acceptance_6_closed_geodesic_counts():
    delta = 10**6
    worst = 0.0
    for f in (IntForm(1, 1, -1), IntForm(1, 0, -2), IntForm(1, 0, -3),
              IntForm(1, 1, -3), IntForm(1, 1, -4)):
        cg = closed_geodesic(f)
        emp, pred = cm_count_closed(cg, delta)
        rel = abs(emp - pred) / pred
        worst = max(worst, rel)
        if f.discriminant() == 5:
            # headline figure for D = 5
            assert abs(pred - 130813) < 0.001 * 130813
    _line(
        6,
        worst <= 0.05,
        f"CM counts on fundamental arcs, D in 5,8,12,13,17 at 1e6: "
        f"worst relative error {worst:.4g} (tol 5%)",
    )


def test_acceptance_7_cycle_averages():
    worst = 0.0
    for f in (IntForm(1, 1, -1), IntForm(1, 0, -2)):
        cg = closed_geodesic(f)
        estimates, _ = cycle_value(CONSTANT_ONE, f, [10**6])
        rel = abs(estimates[0][1] - cg.length) / cg.length
        worst = max(worst, rel)
    estimates, quadv = cycle_value(J_FUNCTION, IntForm(1, 1, -1), [10**6])
    j_rel = abs(estimates[0][1] - quadv) / abs(quadv)
    ok = worst <= 0.03 and j_rel <= 0.05
    _line(
        7,
        ok,
        f"f=1: worst relative error {worst:.4g} vs arc length (tol 3%); "
        f"f=j on D=5: {j_rel:.4g} vs quadrature (tol 5%)",
    )


def test_acceptance_8_totient_lemmas():
    T = 10**5
    table = phi_sieve(T)
    exact1, _ = sum_phi(T, table)
    ratio = exact1 * math.pi**2 / (3 * 10**10)
    exact2, main2 = sum_phi_over_n(T, table)
    gap2 = abs(exact2 - main2)
    delta = 10**4
    e_log, m_log = weighted_sqrt_sum(1, 5, 1, 4, delta)
    e_at, m_at = weighted_sqrt_sum(1, -4, 0.1, 0.9, delta)
    bound = 5 * math.sqrt(delta) * math.log(delta) ** 2
    ok = (
        0.999 <= ratio <= 1.001
        and gap2 < 5 * math.log(T)
        and abs(e_log - m_log) < bound
        and abs(e_at - m_at) < bound
    )
    _line(
        8,
        ok,
        f"sum_phi ratio {ratio:.6f}; sum_phi/n gap {gap2:.3g} < {5 * math.log(T):.3g}; "
        f"weighted sums off by {abs(e_log - m_log):.4g} (log), "
        f"{abs(e_at - m_at):.4g} (arctan), bound {bound:.4g}",
    )


def test_acceptance_9_geometry():
    z0 = PointH(0, 1)
    h = 1e-5
    worst = 0.0
    for x in np.linspace(0.05, 2.0, 40):
        for y in np.linspace(0.3, 3.0, 25):
            def s(a, b):
                return dist(z0, PointH(a, b))

            def th(a, b):
                return ang_p(z0, PointH(a, b))

            s_x = (s(x + h, y) - s(x - h, y)) / (2 * h)
            s_y = (s(x, y + h) - s(x, y - h)) / (2 * h)
            t_x = (th(x + h, y) - th(x - h, y)) / (2 * h)
            t_y = (th(x, y + h) - th(x, y - h)) / (2 * h)
            jac = s_x * t_y - s_y * t_x
            worst = max(worst, abs(jac + 1 / (y * y * math.sinh(s(x, y)))))
    assert worst < 1e-6, f"Jacobian identity off by {worst:.3g}"

    # area of a metric ball and a half sector, against direct region integrals
    z0 = PointH(0.3, 1.2)
    s0 = 0.8
    be = ball(z0, s0)
    xc, yc, re = be.center.x, be.center.y, be.radius_euclid

    def strip(x):
        half = math.sqrt(max(re * re - (x - xc) ** 2, 0.0))
        return 1 / (yc - half) - 1 / (yc + half)

    full, _ = quad(strip, xc - re, xc + re, limit=200)
    area_full = sector_area(z0, s0, 0.0, 2 * math.pi)
    rel_full = abs(full - area_full) / area_full
    half_quad, _ = quad(strip, z0.x, xc + re, limit=200)
    # the x > x0 side is the angle range (0, pi); xc == x0 by construction
    area_half = sector_area(z0, s0, 0.0, math.pi)
    rel_half = abs(half_quad - area_half) / area_half
    assert rel_full < 1e-6 and rel_half < 1e-6

    # CM points on Im z = 1 are exactly the Farey fractions of bounded order
    delta = 10**4
    x_lo, x_hi = -1.26, 2.49
    pts = enum_cm_on_im1(delta, x_lo, x_hi)
    got = set()
    for p in pts:
        a, b = p.form.a, p.form.b
        n = math.isqrt(a)
        assert n * n == a and b % (2 * n) == 0
        got.add((-b // (2 * n), n))
    n_cap = math.floor((delta / 4) ** 0.25)
    farey = set()
    for n in range(1, n_cap + 1):
        for m in range(math.ceil(n * x_lo), math.floor(n * x_hi) + 1):
            if math.gcd(m, n) == 1:
                farey.add((m, n))
    assert got == farey
    _line(
        9,
        True,
        f"Jacobian identity off by {worst:.3g} (tol 1e-6); ball/sector areas "
        f"within {max(rel_full, rel_half):.3g} of quadrature (tol 1e-6); "
        f"Im=1 line matches {len(farey)} Farey points exactly",
    )


def _is_minimal_by_scan(D: int, u0: int) -> bool:
    for u in range(1, u0):
        t2 = 4 + D * u * u
        t = math.isqrt(t2)
        if t * t == t2:
            return False
    return True


def test_acceptance_10_pell_and_matrix():
    scanned = cubed = 0
    for D in range(5, 501):
        if D % 4 not in (0, 1) or math.isqrt(D) ** 2 == D:
            continue
        sol = pell_fundamental(D)
        t0, u0 = sol.t0, sol.u0
        assert t0 * t0 - D * u0 * u0 == 4
        x1, y1 = _pell_one(D)
        if u0 <= 3000:
            assert _is_minimal_by_scan(D, u0), f"D={D}: smaller solution exists"
            scanned += 1
        else:
            # large solutions: some exact power of (t0 + u0 sqrt(D)) / 2 must
            # be the continued-fraction unit x1 + y1 sqrt(D), and minimality
            # of the latter then pins down the former
            k, (tk, uk) = 1, (t0, u0)
            while k <= 6 and (tk, uk) != (2 * x1, 2 * y1):
                tk, uk = (tk * t0 + uk * u0 * D) // 2, (tk * u0 + uk * t0) // 2
                k += 1
            assert (tk, uk) == (2 * x1, 2 * y1), f"D={D}: no power matches CF unit"
            if (t0, u0) == (2 * x1, 2 * y1):
                # also rule out a smaller half-integer unit whose cube it is
                mpmath.mp.dps = 30 + 2 * max(x1.bit_length(), 1) // 3
                r = (x1 + y1 * mpmath.sqrt(D)) ** (mpmath.mpf(1) / 3)
                t = int(mpmath.nint(r + 1 / r))
                u = int(mpmath.nint((r - 1 / r) / mpmath.sqrt(D)))
                assert not (
                    t * t - D * u * u == 4
                    and 0 < u < u0
                    and t ** 3 + 3 * t * u * u * D == 8 * x1
                ), f"D={D}: cube root unit exists"
            cubed += 1

    rng = random.Random(77)
    for _ in range(50):
        while True:
            a = rng.randint(1, 8)
            b = rng.randint(-8, 8)
            c = rng.randint(-8, -1)
            D = b * b - 4 * a * c
            if math.gcd(math.gcd(a, abs(b)), abs(c)) == 1 and math.isqrt(D) ** 2 != D:
                break
        cg = closed_geodesic(IntForm(a, b, c))
        (p, q), (r, s) = cg.gamma
        assert p * s - q * r == 1
        assert (
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        ) == (a, b, c)
    _line(
        10,
        True,
        f"Pell exact and minimal for all valid D <= 500 "
        f"({scanned} by scan, {cubed} by unit identity); "
        f"50 random stabilizers have det 1 and fix their form",
    )
