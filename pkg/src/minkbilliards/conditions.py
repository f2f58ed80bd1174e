"""Rank-type periodicity conditions and the winding-number integral relation.

The branch polynomial of a caustic pair (gamma1, gamma2) on the ellipsoid
(a1, a2, a3) is

    P(x) = eps (a1-x)(a2-x)(a3+x)(gamma1-x)(gamma2-x),   eps = sign(g1*g2),

so P(0) > 0.  The conditions engine works with exact rationals only; the
kinds of normalized series and the Hankel block shapes are:

    even n = 2m:  A block (m-1) x (m-2) starting at A4, deficient if rank < m-2
                  B block  m    x (m-1) starting at B2, deficient if rank < m-1
    odd  n = 2m+1: C / D blocks m x (m-1) starting at C3 / D3, rank < m-1

with B = A / ((1-x/g1)(1-x/g2)), C = A / (1-x/g1), D = A / (1-x/g2).
The double-caustic and light-like limits use the corresponding degenerate
branch polynomials (gamma repeated, or the quartic without gamma2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.integrate import quad

from .confocal import CausticCase, IntervalPartition
from .errors import (
    CaseMismatchError,
    GammaOutOfRangeError,
    NonpositiveIntegrandError,
    SingularCurveError,
    ZeroGammaError,
)
from .series import (
    NormalizedSeries,
    SeriesKind,
    hankel_rank,
    normalized_branch_poly,
    series_div,
    series_mul,
    series_sqrt,
)

RATIONALIZE_DENOMINATOR_BOUND = 10 ** 9


def rationalize(x: float, bound: int = RATIONALIZE_DENOMINATOR_BOUND) -> Fraction:
    """Continued-fraction rational approximation with bounded denominator."""
    return Fraction(x).limit_denominator(bound)


@dataclass(frozen=True)
class HyperellipticParams:
    """Exact rational curve data; gamma2 is None for the light-like limit
    and equal to gamma1 for the double caustic."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    gamma1: Fraction
    gamma2: Fraction | None

    def __post_init__(self) -> None:
        if not (self.a1 > self.a2 > 0 and self.a3 > 0):
            raise SingularCurveError(f"invalid ellipsoid {(self.a1, self.a2, self.a3)}")
        specials = {self.a1, self.a2, -self.a3}
        gammas = [self.gamma1] + ([] if self.gamma2 is None else [self.gamma2])
        for g in gammas:
            if g in specials or g == 0:
                raise SingularCurveError(f"caustic parameter {g} makes the curve singular")

    @property
    def is_lightlike(self) -> bool:
        return self.gamma2 is None

    @property
    def is_double(self) -> bool:
        return self.gamma2 is not None and self.gamma2 == self.gamma1

    @property
    def epsilon(self) -> int:
        if self.gamma2 is None:
            return +1    # neutral placeholder; the light-like tests never read it
        return 1 if self.gamma1 * self.gamma2 > 0 else -1

    @classmethod
    def from_floats(cls, a1: float, a2: float, a3: float,
                    gamma1: float, gamma2: float | None,
                    bound: int = RATIONALIZE_DENOMINATOR_BOUND) -> "HyperellipticParams":
        return cls(rationalize(a1, bound), rationalize(a2, bound), rationalize(a3, bound),
                   rationalize(gamma1, bound),
                   None if gamma2 is None else rationalize(gamma2, bound))

    def branch_poly_normalized(self) -> list[Fraction]:
        """P(x)/P(0) (or its degenerate limit) as an exact polynomial."""
        roots = [(self.a1, 1), (self.a2, 1), (-self.a3, 1)]
        if self.gamma2 is None:
            roots.append((self.gamma1, 1))
        elif self.is_double:
            roots.append((self.gamma1, 2))
        else:
            roots += [(self.gamma1, 1), (self.gamma2, 1)]
        return normalized_branch_poly(roots)


def sqrt_series(params: HyperellipticParams, order: int) -> NormalizedSeries:
    """Normalized square-root series of the branch polynomial.

    Generic parameters give the A kind; the double caustic gives the series
    of (gamma1-x) sqrt((a1-x)(a2-x)(a3+x)) and the light-like limit the
    series of sqrt((a1-x)(a2-x)(a3+x)(gamma1-x)), each normalized to 1 at 0.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if params.is_double:
        base = normalized_branch_poly([(params.a1, 1), (params.a2, 1), (-params.a3, 1)])
        s = series_sqrt(base, order)
        lin = [Fraction(1), Fraction(-1) / params.gamma1]
        return NormalizedSeries(SeriesKind.DOUBLE_A, tuple(series_mul(s, lin, order)))
    if params.is_lightlike:
        base = params.branch_poly_normalized()
        return NormalizedSeries(SeriesKind.LIGHT_A, tuple(series_sqrt(base, order)))
    base = params.branch_poly_normalized()
    return NormalizedSeries(SeriesKind.A, tuple(series_sqrt(base, order)))


def divided_series(base: NormalizedSeries, kind: SeriesKind,
                   params: HyperellipticParams) -> NormalizedSeries:
    """Divide the base series by the normalized caustic factor(s) of ``kind``."""
    order = base.order
    coeffs = list(base.coeffs)
    g1 = params.gamma1
    if g1 == 0:
        raise ZeroGammaError("gamma1 must be nonzero")
    lin1 = [Fraction(1), Fraction(-1) / g1]
    if kind is SeriesKind.B:
        if base.kind is not SeriesKind.A or params.gamma2 is None:
            raise ValueError("B series divides the A series by both caustic factors")
        lin2 = [Fraction(1), Fraction(-1) / params.gamma2]
        out = series_div(series_div(coeffs, lin1, order), lin2, order)
    elif kind is SeriesKind.C:
        if base.kind is not SeriesKind.A:
            raise ValueError("C series divides the A series")
        out = series_div(coeffs, lin1, order)
    elif kind is SeriesKind.D:
        if base.kind is not SeriesKind.A or params.gamma2 is None:
            raise ValueError("D series divides the A series by the gamma2 factor")
        lin2 = [Fraction(1), Fraction(-1) / params.gamma2]
        out = series_div(coeffs, lin2, order)
    elif kind is SeriesKind.DOUBLE_B:
        if base.kind is not SeriesKind.DOUBLE_A:
            raise ValueError("doubleB divides the doubleA series twice by the caustic factor")
        out = series_div(series_div(coeffs, lin1, order), lin1, order)
    elif kind is SeriesKind.LIGHT_B:
        if base.kind is not SeriesKind.LIGHT_A:
            raise ValueError("lightB divides the lightA series by the caustic factor")
        out = series_div(coeffs, lin1, order)
    else:
        raise ValueError(f"not a divided kind: {kind}")
    return NormalizedSeries(kind, tuple(out))


# -- Hankel tests -------------------------------------------------------------

def _test_A(series: NormalizedSeries, m: int) -> bool:
    # (m-1) x (m-2) block from A4; deficiency threshold m-2
    return hankel_rank(series, 4, m - 1, m - 2) < m - 2


def _test_B(series: NormalizedSeries, m: int) -> bool:
    # m x (m-1) block from B2; threshold m-1
    return hankel_rank(series, 2, m, m - 1) < m - 1


def _test_CD(series: NormalizedSeries, m: int) -> bool:
    # m x (m-1) block from C3 (or D3); threshold m-1
    return hankel_rank(series, 3, m, m - 1) < m - 1


def _required_order(n: int) -> int:
    return n + 2


def condition_vector(params: HyperellipticParams, kind: SeriesKind, n: int) -> list[Fraction]:
    """The named small-n coefficient vector whose joint vanishing is the test.

    n=4 (B or doubleB): (B2, B3); n=5 (C, D or lightB): (C3, C4);
    n=6 (A, doubleA or lightA): (A4, A5).  Used by the scalar search and
    the small-matrix agreement checks.
    """
    order = _required_order(n)
    base = sqrt_series(params, order)
    if kind in (SeriesKind.A, SeriesKind.DOUBLE_A, SeriesKind.LIGHT_A):
        s = base
        return [s[4], s[5]]
    s = divided_series(base, kind, params)
    if kind in (SeriesKind.B, SeriesKind.DOUBLE_B):
        return [s[2], s[3]]
    return [s[3], s[4]]


_EVEN_BRANCHES: dict[CausticCase, tuple[str, ...]] = {
    CausticCase.S1: ("A", "B"),
    CausticCase.S2: ("A",),
    CausticCase.S3: ("A",),
    CausticCase.S4: ("A",),
    CausticCase.T1: ("A",),
    CausticCase.T2: ("A",),
    CausticCase.T3: ("A", "B"),
    CausticCase.T4: ("A",),
}

_ODD_BRANCHES: dict[CausticCase, tuple[str, ...]] = {
    CausticCase.S1: ("C", "D"),
    CausticCase.S2: ("C",),
    CausticCase.S3: (),
    CausticCase.S4: ("D",),
    CausticCase.T1: ("C",),
    CausticCase.T2: ("C",),
    CausticCase.T3: (),
    CausticCase.T4: (),
}


def _check_case_consistency(params: HyperellipticParams, case: CausticCase) -> None:
    a1, a2, a3 = params.a1, params.a2, params.a3
    g1, g2 = params.gamma1, params.gamma2
    if case is CausticCase.LIGHT:
        if not params.is_lightlike:
            raise CaseMismatchError("light case needs the at-infinity sentinel")
        return
    if case is CausticCase.DOUBLE:
        if not params.is_double:
            raise CaseMismatchError("double case needs gamma2 == gamma1")
        return
    if g2 is None or params.is_double:
        raise CaseMismatchError(f"case {case} needs two distinct finite caustics")
    placements = {
        CausticCase.S1: -a3 < g2 < 0 < g1 < a2,
        CausticCase.S2: g2 < -a3 and 0 < g1 < a2,
        CausticCase.S3: g2 < -a3 and a2 < g1 < a1,
        CausticCase.S4: -a3 < g2 < 0 and a2 < g1 < a1,
        CausticCase.T1: 0 < g1 < a2 < g2 < a1,
        CausticCase.T2: 0 < g1 < a2 < a1 < g2,
        CausticCase.T3: a2 < g1 < g2 < a1,
        CausticCase.T4: a2 < g1 < a1 < g2,
    }
    if not placements[case]:
        raise CaseMismatchError(f"parameters do not satisfy the {case.value} placement")


def cayley_test(params: HyperellipticParams, case: CausticCase, n: int) -> bool:
    """Exact rank-type periodicity test for the given case and period.

    Dispatches to the A/B (even) and C/D (odd) Hankel blocks admissible for
    the case; below the period thresholds (A: n>=6, B: n>=4, C/D: n>=5) the
    corresponding branch is false.  Double and light-like cases delegate to
    their dedicated tests.
    """
    if n < 3:
        raise ValueError("period must be at least 3")
    _check_case_consistency(params, case)
    if case is CausticCase.DOUBLE:
        return double_caustic_test((params.a1, params.a2, params.a3), params.gamma1, n)
    if case is CausticCase.LIGHT:
        return lightlike_test((params.a1, params.a2, params.a3), params.gamma1, n)

    order = _required_order(n)
    base = sqrt_series(params, order)
    if n % 2 == 0:
        m = n // 2
        for branch in _EVEN_BRANCHES[case]:
            if branch == "A" and n >= 6 and _test_A(base, m):
                return True
            if branch == "B" and n >= 4 and _test_B(divided_series(base, SeriesKind.B, params), m):
                return True
        return False
    m = (n - 1) // 2
    if n < 5:
        return False
    for branch in _ODD_BRANCHES[case]:
        kind = SeriesKind.C if branch == "C" else SeriesKind.D
        if _test_CD(divided_series(base, kind, params), m):
            return True
    return False


def double_caustic_test(a: tuple[Fraction, Fraction, Fraction], gamma1: Fraction, n: int) -> bool:
    """Periodicity test for a trajectory along the double caustic.

    Even n only; the A-type block (n >= 6) acts on the series of
    (gamma1-x) sqrt((a1-x)(a2-x)(a3+x)) and the B-type block (n >= 4) on
    sqrt((a1-x)(a2-x)(a3+x)) / (gamma1-x), both normalized.
    """
    a1, a2, a3 = a
    if not (a2 < gamma1 < a1):
        raise GammaOutOfRangeError(f"double caustic needs gamma1 in ({a2}, {a1})")
    if n % 2 != 0:
        return False
    m = n // 2
    params = HyperellipticParams(a1, a2, a3, gamma1, gamma1)
    base = sqrt_series(params, _required_order(n))
    if n >= 6 and _test_A(base, m):
        return True
    if n >= 4 and _test_B(divided_series(base, SeriesKind.DOUBLE_B, params), m):
        return True
    return False


def lightlike_test(a: tuple[Fraction, Fraction, Fraction], gamma1: Fraction, n: int) -> bool:
    """Periodicity test for light-like trajectories with caustic Q_gamma1.

    Even n >= 6: A-type block on sqrt((a1-x)(a2-x)(a3+x)(gamma1-x)).
    Odd n >= 5 with an ellipsoid caustic only: the shifted B-type block
    (rows from B3) on sqrt((a1-x)(a2-x)(a3+x)/(gamma1-x)).
    """
    a1, a2, a3 = a
    if not (-a3 < gamma1 < a2 or a2 < gamma1 < a1):
        raise GammaOutOfRangeError(f"gamma1={gamma1} is not a non-degenerate caustic parameter")
    params = HyperellipticParams(a1, a2, a3, gamma1, None)
    base = sqrt_series(params, _required_order(n))
    if n % 2 == 0:
        m = n // 2
        return n >= 6 and _test_A(base, m)
    if not (-a3 < gamma1 < a2):
        return False     # odd periods require the ellipsoid caustic
    if n < 5:
        return False
    m = (n - 1) // 2
    s = divided_series(base, SeriesKind.LIGHT_B, params)
    return hankel_rank(s, 3, m, m - 1) < m - 1


# -- winding-number integrals -------------------------------------------------

def darboux_integrals(params_real: tuple[float, float, float, float, float | None],
                      partition: IntervalPartition, k: int,
                      abs_tol: float = 1e-10) -> tuple[float, float, float]:
    """The three integrals of lam^k d lam / sqrt(P) over the motion intervals.

    Orientations follow the closure relation: I1 runs 0 -> c1 (downward),
    I2 runs 0 -> b1 and I3 runs b2 -> b3 (upward), each on the positive
    branch of sqrt(P); a period with winding counts (m1, n1, n2) then
    satisfies m1*I1 + n1*I2 - n2*I3 = 0 for k in {0, 1}.  Inverse-square-root
    endpoint singularities are removed by the substitution lam = r +/- u^2.
    """
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    a1, a2, a3, g1, g2 = params_real
    eps = 1.0
    roots = [a1, a2, -a3, g1]
    if g2 is not None:
        eps = math.copysign(1.0, g1 * g2)
        roots.append(g2)

    def P(x: float) -> float:
        acc = eps * (a1 - x) * (a2 - x) * (a3 + x) * (g1 - x)
        if g2 is not None:
            acc *= (g2 - x)
        return acc

    root_set = roots

    def is_root(x: float) -> bool:
        return any(abs(x - r) <= 1e-13 * max(1.0, abs(r)) for r in root_set)

    def sqrt_p(x: float) -> float:
        px = P(x)
        if px <= 0.0:
            raise NonpositiveIntegrandError(
                f"branch polynomial not positive at {x} inside an integration interval")
        return math.sqrt(px)

    def integrate(lo: float, hi: float) -> float:
        """Integral of x^k/sqrt(P) over [lo, hi] ascending, positive branch."""
        if hi <= lo:
            return 0.0
        mid = 0.5 * (lo + hi)
        if P(mid) <= 0.0:
            raise NonpositiveIntegrandError(
                f"branch polynomial not positive inside [{lo}, {hi}]")
        total = 0.0
        # lower half, substitute x = lo + u^2 when lo is a branch point
        if is_root(lo):
            du = math.sqrt(mid - lo)
            val, _ = quad(lambda u: 2.0 * u * (lo + u * u) ** k / sqrt_p(lo + u * u),
                          0.0, du, epsabs=abs_tol, epsrel=1e-12, limit=200)
            total += val
        else:
            val, _ = quad(lambda x: x ** k / sqrt_p(x), lo, mid,
                          epsabs=abs_tol, epsrel=1e-12, limit=200)
            total += val
        # upper half, substitute x = hi - u^2 when hi is a branch point
        if is_root(hi):
            du = math.sqrt(hi - mid)
            val, _ = quad(lambda u: 2.0 * u * (hi - u * u) ** k / sqrt_p(hi - u * u),
                          0.0, du, epsabs=abs_tol, epsrel=1e-12, limit=200)
            total += val
        else:
            val, _ = quad(lambda x: x ** k / sqrt_p(x), mid, hi,
                          epsabs=abs_tol, epsrel=1e-12, limit=200)
            total += val
        return total

    (c1, _), (_, b1), (b2, b3) = partition.motion_intervals()
    i1 = -integrate(c1, 0.0)     # oriented 0 -> c1
    i2 = integrate(0.0, b1)
    if abs(b3 - b2) <= 1e-12 * max(abs(b2), 1.0):
        # double caustic: the third interval collapses but its cycle integral
        # has a finite limit, pi x^k / sqrt(-eps K(x)) at the double root
        kk = eps * (a1 - b2) * (a2 - b2) * (a3 + b2)
        if kk >= 0.0:
            raise NonpositiveIntegrandError("degenerate interval is not a vanishing cycle")
        i3 = math.pi * b2 ** k / math.sqrt(-kk)
    else:
        i3 = integrate(b2, b3)
    return (i1, i2, i3)
