"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the per-criterion
lines and timings.
"""

import math
import random
import time
from fractions import Fraction as F

from minkbilliards import (
    CausticCase,
    CausticPair,
    Ellipsoid,
    HyperellipticParams,
    LineType,
    PellVariant,
    SearchSpec,
    Vec3,
    cayley_test,
    chasles_residual,
    classify_direction,
    compose_pell,
    cross_validate,
    darboux_integrals,
    detect_period,
    elliptic_coordinates,
    find_periodic,
    interval_partition,
    lightlike_test,
    point_from_elliptic,
    reflect_at,
    solve_pell,
    surface_normal,
    tangent_line_for_caustics,
    trace,
    verify_pell,
)
from minkbilliards.errors import DegeneratePointError, UndefinedReflectionError
from minkbilliards.pell import weight_polys
from minkbilliards.search import (
    condition_vector_floats,
    scan_singular_condition,
    _newton2,
)
from minkbilliards.series import (
    SeriesKind,
    matrix_rank_fraction_free,
    rank_by_minors,
)
from conftest import admissible_trace, random_interior_point

E421 = Ellipsoid(4.0, 2.0, 1.0)

# exact rational configuration satisfying the n=4 two-caustic condition
# (S1 placement on its own ellipsoid); used for the positive exactness leg
EXACT_ELL = Ellipsoid(1.0, 6.0 / 7.0, 6.0)
EXACT_PARAMS = HyperellipticParams(F(1), F(6, 7), F(6), F(3, 4), F(-3))
EXACT_CP = CausticPair(0.75, -3.0, LineType.SPACELIKE, -1)


def report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num}: {detail}"


# shared pipeline results, computed once
_pipeline_cache: dict = {}


def _validated_configs():
    if "configs" in _pipeline_cache:
        return _pipeline_cache["configs"]
    out = []
    cands4 = find_periodic(SearchSpec((4.0, 2.0, 1.0), CausticCase.S1, 4, grid=32))
    assert cands4, "no S1 n=4 candidate found"
    cp4 = CausticPair(cands4[0].gamma1, cands4[0].gamma2, LineType.SPACELIKE, -1)
    out.append((E421, cp4, 4, cross_validate(E421, cp4, 4), cands4[0]))
    cands5 = find_periodic(SearchSpec((4.0, 2.0, 1.0), CausticCase.S2, 5, grid=32))
    assert cands5, "no S2 n=5 candidate found"
    cp5 = CausticPair(cands5[0].gamma1, cands5[0].gamma2, LineType.SPACELIKE, -1)
    out.append((E421, cp5, 5, cross_validate(E421, cp5, 5), cands5[0]))
    # the exact rational configuration runs the same pipeline on its ellipsoid
    out.append((EXACT_ELL, EXACT_CP, 4, cross_validate(EXACT_ELL, EXACT_CP, 4), None))
    _pipeline_cache["configs"] = out
    return out


def test_criterion_01_chasles():
    t0 = time.time()
    rng = random.Random(101)
    worst = 0.0
    for lt in (LineType.SPACELIKE, LineType.TIMELIKE, LineType.LIGHTLIKE):
        for _ in range(100):
            t = admissible_trace(rng, E421, lt, 100)
            worst = max(worst, chasles_residual(t))
    elapsed = time.time() - t0
    report(1, worst <= 1e-8 and elapsed <= 10.0,
           f"300 traces, worst residual {worst:.2e}, {elapsed:.1f}s")


def test_criterion_02_type_preservation():
    rng = random.Random(102)
    exceptions = 0
    total = 0
    for lt in (LineType.SPACELIKE, LineType.TIMELIKE, LineType.LIGHTLIKE):
        for _ in range(100):
            t = admissible_trace(rng, E421, lt, 100)
            t0 = classify_direction(t.start_direction, tol=1e-9)
            for b in t.bounces:
                total += 1
                if classify_direction(b.outgoing, tol=1e-9) is not t0:
                    exceptions += 1
    report(2, exceptions == 0, f"{total} segments checked, {exceptions} exceptions")


def test_criterion_03_elliptic_round_trip():
    t0 = time.time()
    rng = random.Random(103)
    worst = 0.0
    n = 0
    while n < 1000:
        p = random_interior_point(rng, E421, slack=0.02)
        try:
            c = elliptic_coordinates(p, E421)
        except DegeneratePointError:
            continue
        n += 1
        assert -1 < c.lam1 < 0 < c.lam2 < 2 < c.lam3 < 4
        signs = (1 if p.x1 >= 0 else -1, 1 if p.x2 >= 0 else -1, 1 if p.x3 >= 0 else -1)
        q = point_from_elliptic(c, signs, E421)
        worst = max(worst, (p - q).euclid_norm() / max(p.euclid_norm(), 1.0))
    elapsed = time.time() - t0
    report(3, worst <= 1e-9 and elapsed <= 2.0,
           f"1000 points, worst relative error {worst:.2e}, {elapsed:.1f}s")


def test_criterion_04_hankel_oracle():
    t0 = time.time()
    rng = random.Random(104)
    mismatches = 0
    for trial in range(1000):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        if trial % 3 == 0:
            base = F(rng.randint(1, 5), rng.randint(1, 4))
            coeffs = [F(rng.randint(1, 9)) * base ** k for k in range(rows + cols)]
        else:
            coeffs = [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(rows + cols)]
        m = [[coeffs[i + j] for j in range(cols)] for i in range(rows)]
        if matrix_rank_fraction_free([r[:] for r in m]) != rank_by_minors(m):
            mismatches += 1
    elapsed = time.time() - t0
    report(4, mismatches == 0 and elapsed <= 5.0,
           f"1000 blocks, {mismatches} mismatches, {elapsed:.1f}s")


def test_criterion_05_n4_closure():
    t0 = time.time()
    configs = _validated_configs()
    ell, cp, n, rep, cand = configs[0]
    # the candidate satisfies the first named coefficient condition (B2 = 0)
    b2, b3 = condition_vector_floats((4.0, 2.0, 1.0), SeriesKind.B, 4,
                                     cp.gamma1, cp.gamma2)
    ok = (abs(b2) <= 1e-12
          and 0 < cp.gamma1 < 2 and -1 < cp.gamma2 < 0
          and rep.closure_error <= 1e-6
          and rep.signature is not None and rep.signature.n == 4
          and rep.signature.m1 % 2 == 1 and rep.signature.n1 % 2 == 1
          and rep.signatures_agree)
    elapsed = time.time() - t0
    report(5, ok and elapsed <= 30.0,
           f"root ({cp.gamma1:.6f}, {cp.gamma2:.6f}), closure {rep.closure_error:.2e}, "
           f"signature {rep.signature}, 3 starts agree: {rep.signatures_agree}, {elapsed:.1f}s")


def test_criterion_06_n5_closure():
    t0 = time.time()
    configs = _validated_configs()
    ell, cp, n, rep, cand = configs[1]
    ok = (rep.closure_error <= 1e-6
          and rep.signature is not None and rep.signature.n == 5
          and rep.parity_pass          # S2: cap count and sweep count even
          and rep.signature.m1 % 2 == 0 and rep.signature.n2 % 2 == 0
          and rep.signatures_agree)
    elapsed = time.time() - t0
    report(6, ok and elapsed <= 30.0,
           f"S2 root ({cp.gamma1:.6f}, {cp.gamma2:.6f}), closure {rep.closure_error:.2e}, "
           f"signature {rep.signature}, {elapsed:.1f}s")


def test_criterion_07_pell_equivalence_and_exactness():
    t0 = time.time()
    checks = []

    # (a) equivalence at every pipeline configuration: the exact solver finds
    # a solution iff the exact rank test passes at the same rational point.
    # Grid roots are algebraic irrationals, so at their rationalizations both
    # sides are false; at the exact rational configuration both are true.
    for (ell, cp, n, rep, cand) in _validated_configs():
        params = HyperellipticParams.from_floats(ell.a1, ell.a2, ell.a3,
                                                 cp.gamma1, cp.gamma2)
        case = rep.case
        rank_side = cayley_test(params, case, n)
        variant = PellVariant.EVEN_B if n == 4 else PellVariant.ODD_C
        sol = solve_pell(params, n, variant)
        checks.append((sol is not None) == rank_side)
        if rep.cayley_pass:
            checks.append(sol is not None and verify_pell(sol))

    # (b) exactness at the rational configuration: solve, verify and compose
    # are exact; the composed pair satisfies the degree-6-weight equation.
    sol = solve_pell(EXACT_PARAMS, 4, PellVariant.EVEN_B)
    checks.append(sol is not None and verify_pell(sol))
    comp = compose_pell(sol)
    checks.append(verify_pell(comp) and comp.rhs == 1)
    u, v = weight_polys(PellVariant.EVEN_A, EXACT_PARAMS)
    expansion = u * (comp.p * comp.p) - v * (comp.q * comp.q)
    checks.append(expansion.degree == 0 and expansion.coeffs[0] == F(1))

    # (c) 20 random non-periodic parameter sets: absent and false, both ways
    rng = random.Random(107)
    done = 0
    while done < 20:
        g1 = F(rng.randint(1, 15), 8)
        g2 = F(-rng.randint(1, 7), 8)
        if not (-1 < g2 < 0 < g1 < 2):
            continue
        params = HyperellipticParams(F(4), F(2), F(1), g1, g2)
        if cayley_test(params, CausticCase.S1, 4):
            continue    # astronomically unlikely; skip genuine roots
        done += 1
        checks.append(solve_pell(params, 4, PellVariant.EVEN_B) is None)
        checks.append(cayley_test(params, CausticCase.S1, 4) is False)
    elapsed = time.time() - t0
    report(7, all(checks) and elapsed <= 10.0,
           f"{len(checks)} equivalence/exactness checks, {elapsed:.1f}s")


def test_criterion_08_darboux_relation():
    t0 = time.time()
    residuals = []
    for (ell, cp, n, rep, cand) in _validated_configs():
        assert rep.signature is not None
        sig = rep.signature
        part = interval_partition(cp, ell)
        for k in (0, 1):
            i1, i2, i3 = darboux_integrals((ell.a1, ell.a2, ell.a3,
                                            cp.gamma1, cp.gamma2), part, k)
            scale = max(abs(i1), abs(i2), abs(i3))
            residuals.append(abs(sig.m1 * i1 + sig.n1 * i2 - sig.n2 * i3) / scale)
    worst = max(residuals)
    elapsed = time.time() - t0
    report(8, worst <= 1e-6 and elapsed <= 5.0,
           f"{len(residuals)} relations, worst residual {worst:.2e}, {elapsed:.1f}s")


def test_criterion_09_parity_exclusion():
    t0 = time.time()
    rng = random.Random(109)
    odd_reports = 0
    detected = 0
    rect = {CausticCase.S3: ((2.05, 3.95), (-5.0, -1.05), LineType.SPACELIKE, -1),
            CausticCase.T4: ((2.05, 3.95), (4.05, 9.0), LineType.TIMELIKE, +1)}
    done = 0
    while done < 1000:
        case = CausticCase.S3 if done % 2 == 0 else CausticCase.T4
        (g1r, g2r, lt, eps) = rect[case]
        cp = CausticPair(rng.uniform(*g1r), rng.uniform(*g2r), lt, eps)
        try:
            x, v = tangent_line_for_caustics(E421, cp, seed=done % 8)
        except Exception:
            continue
        t = trace(x, v, E421, 200)
        if t.error is not None:
            continue
        done += 1
        sig = detect_period(t, tol=1e-6)
        if sig is not None:
            detected += 1
            if sig.n % 2 == 1:
                odd_reports += 1
    elapsed = time.time() - t0
    report(9, odd_reports == 0 and elapsed <= 60.0,
           f"1000 traces (S3/T4), {detected} periods detected, {odd_reports} odd, {elapsed:.1f}s")


def test_criterion_10_lightlike_limit():
    t0 = time.time()
    # the odd light-like condition has no root on the baseline shape: the
    # scan over the ellipsoid-caustic range is empty, and stays empty for
    # every perturbed a1 in [3, 6] (the criterion's contingency range)
    roots_base = scan_singular_condition((4.0, 2.0, 1.0), CausticCase.LIGHT, 5,
                                         (0.05, 1.95))
    empties = [roots_base == []]
    for a1 in [3.0 + 0.25 * k for k in range(13)]:
        r = scan_singular_condition((a1, 2.0, 1.0), CausticCase.LIGHT, 5, (0.05, 1.95))
        empties.append(r == [])
    # oracle: the scanned coefficient is strictly positive across the range
    oracle_positive = all(
        condition_vector_floats((4.0, 2.0, 1.0), SeriesKind.LIGHT_B, 5, g, None)[0] > 0
        for g in [0.02 + k * 1.96 / 599 for k in range(600)])

    # the roots exist on taller shapes: refine one and validate the closure
    def fun(x):
        return condition_vector_floats((3.0, 2.5, float(x[1])), SeriesKind.LIGHT_B, 5,
                                       float(x[0]), None)

    x, ok = _newton2(fun, (2.3, 4.5), 1e-13)
    g1, a3 = float(x[0]), float(x[1])
    ell = Ellipsoid(3.0, 2.5, a3)
    cp = CausticPair(g1, None, LineType.LIGHTLIKE, +1)
    rep = cross_validate(ell, cp, 5)
    closure_ok = (ok and rep.closure_error <= 1e-6
                  and rep.signature is not None and rep.signature.n == 5
                  and rep.parity_pass)

    # odd periods with a hyperboloid caustic are impossible
    hyper_false = (lightlike_test((F(4), F(2), F(1)), F(3), 5) is False
                   and lightlike_test((F(4), F(2), F(1)), F(3), 7) is False)
    elapsed = time.time() - t0
    report(10, all(empties) and oracle_positive and closure_ok and hyper_false
           and elapsed <= 60.0,
           f"baseline scans empty (oracle agrees); validated 5-periodic light-like "
           f"closure {rep.closure_error:.2e} at gamma1={g1:.6f}, a3={a3:.6f}; "
           f"hyperboloid odd test false; {elapsed:.1f}s")


def test_criterion_11_degenerate_contracts():
    t0 = time.time()
    # transversal reflection at a light-like-normal point is undefined
    x3 = 1.0 / math.sqrt(5.0)
    p = Vec3(4.0 * x3, 0.0, x3)
    n = surface_normal(p, E421)
    assert abs(n.x1 ** 2 + n.x2 ** 2 - n.x3 ** 2) <= 1e-12
    raised = False
    try:
        reflect_at(p, Vec3(1.0, 0.0, 0.0), E421)
    except UndefinedReflectionError:
        raised = True
    # axial period-2 orbit through the poles
    t = trace(Vec3(0, 0, 0), Vec3(0, 0, 1), E421, 6)
    sig = detect_period(t)
    axial_ok = (t.error is None and sig is not None
                and (sig.n, sig.m1, sig.n1) == (2, 2, 0))
    elapsed = time.time() - t0
    report(11, raised and axial_ok and elapsed <= 1.0,
           f"tropic transversal raises, axial signature {sig}, {elapsed:.2f}s")
