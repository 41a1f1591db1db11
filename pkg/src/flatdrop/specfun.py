"""Special functions and exact polynomial certificates.

Complete elliptic integrals K(m) and E(m) in the *parameter* convention
(m = e^2, the square of the eccentricity), the closed-form comparison
functions f and g that control the accuracy of the cube-root capacitary
estimate for ellipses, and an exact rational-arithmetic toolkit
(RationalPolynomial, Sturm sequences) used to certify that the two
polynomials appearing in the sign proof of g keep constant sign on [0, 1].

Floating point is used only for K, E, f and g themselves; everything on
the certificate path (Taylor truncations, polynomial division, Sturm
chains) is exact over the rationals, with pi carried symbolically as a
factored-out constant.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "RationalPolynomial",
    "elliptic_K",
    "elliptic_E",
    "dudko_f",
    "dudko_g",
    "taylor_K15",
    "taylor_E15",
    "derive_certificate",
    "sturm_constant_sign",
    "SQUARE_SELF_INTERACTION",
]

# Mean of 1/|x - y| over two independent uniform points in the unit square.
# Closed form 4*ln(1 + sqrt(2)) + 4*(1 - sqrt(2))/3, cross-checked against a
# quasi-Monte Carlo estimate in the test suite.  Scaled by 1/sqrt(cell area)
# it gives the self-interaction coefficient of a mesh cell.
SQUARE_SELF_INTERACTION = 4.0 * math.log(1.0 + math.sqrt(2.0)) + 4.0 * (1.0 - math.sqrt(2.0)) / 3.0

_AGM_RTOL = 1e-15

Rational = Union[int, Fraction]


def elliptic_K(parameter: float) -> float:
    """Complete elliptic integral of the first kind, K(m).

    Arithmetic-geometric-mean iteration: K(m) = pi / (2 * AGM(1, sqrt(1-m))).
    Accurate to full double precision for m in [0, 1); diverges at m = 1.
    """
    m = float(parameter)
    if not 0.0 <= m < 1.0:
        raise ValueError(f"elliptic_K requires 0 <= m < 1, got {m}")
    a, b = 1.0, math.sqrt(1.0 - m)
    while abs(a - b) > _AGM_RTOL * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def elliptic_E(parameter: float) -> float:
    """Complete elliptic integral of the second kind, E(m).

    Uses the AGM with the c_n correction sum:
    E(m) = K(m) * (1 - sum_n 2^(n-1) c_n^2), c_0 = sqrt(m).
    Defined on [0, 1]; E(1) = 1 exactly (degenerate ellipse).
    """
    m = float(parameter)
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"elliptic_E requires 0 <= m <= 1, got {m}")
    if m == 1.0:
        return 1.0
    a, b = 1.0, math.sqrt(1.0 - m)
    csum = 0.5 * m  # 2^(-1) * c_0^2
    n = 0
    while abs(a - b) > _AGM_RTOL * a:
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        n += 1
        csum += 2.0 ** (n - 1) * c * c
    k_val = math.pi / (2.0 * a)
    return k_val * (1.0 - csum)


def dudko_f(x: float) -> float:
    """f(x) = 16 sqrt(1-x) K^3(x) E(x) / pi^4 on (0, 1).

    f <= 1 everywhere on (0, 1) with f(0+) = 1; the cube root of 1/f is the
    relative error of the cube-root capacitary estimate for an ellipse with
    eccentricity e = sqrt(x).
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"dudko_f requires 0 < x < 1, got {x}")
    k_val = elliptic_K(x)
    return 16.0 * math.sqrt(1.0 - x) * k_val ** 3 * elliptic_E(x) / math.pi ** 4


_G_SMALL_CUTOFF = 0.05
_g_series_cache: tuple[list[float], list[float]] | None = None


def _g_series_ratio() -> tuple[list[float], list[float]]:
    global _g_series_cache
    if _g_series_cache is None:
        p27, q15 = derive_certificate()
        _g_series_cache = ([float(c) for c in p27.coeffs], [float(c) for c in q15.coeffs])
    return _g_series_cache


def dudko_g(x: float) -> float:
    """g(x) = 3E(x) - (2-x)K(x) - (1-x)K^2(x)/E(x) on (0, 1).

    Negative on all of (0, 1) (certified exactly via derive_certificate and
    sturm_constant_sign); g(0+) = 0.  Below x = 0.05 the direct expression
    loses the tiny value (~ -0.009 x^4) to cancellation, so the certificate
    ratio pi x^4 P27(x)/Q15(x) is used instead, which matches g to relative
    O(x^12), i.e. beyond double precision on that range.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"dudko_g requires 0 < x < 1, got {x}")
    if x <= _G_SMALL_CUTOFF:
        p_coeffs, q_coeffs = _g_series_ratio()
        p_val = 0.0
        for c in reversed(p_coeffs):
            p_val = p_val * x + c
        q_val = 0.0
        for c in reversed(q_coeffs):
            q_val = q_val * x + c
        return math.pi * x**4 * p_val / q_val
    k_val = elliptic_K(x)
    e_val = elliptic_E(x)
    return 3.0 * e_val - (2.0 - x) * k_val - (1.0 - x) * k_val * k_val / e_val


class RationalPolynomial:
    """Polynomial with exact rational coefficients, index = degree.

    All arithmetic (addition, multiplication, division with remainder,
    derivative, evaluation) is exact; no floating point enters.  Instances
    are immutable and normalized so the leading coefficient is nonzero
    unless the polynomial is identically zero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational]):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def zero(cls) -> "RationalPolynomial":
        return cls([])

    @classmethod
    def monomial(cls, degree: int, coeff: Rational = 1) -> "RationalPolynomial":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(
            [self[i] + other[i] for i in range(n)]
        )

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(
            [self[i] - other[i] for i in range(n)]
        )

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial([-c for c in self.coeffs])

    def __mul__(self, other: Union["RationalPolynomial", Rational]) -> "RationalPolynomial":
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __divmod__(self, other: "RationalPolynomial") -> tuple["RationalPolynomial", "RationalPolynomial"]:
        """Exact Euclidean division: self = q*other + r with deg r < deg other."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        div = other.coeffs
        dq = len(rem) - len(div)
        if dq < 0:
            return RationalPolynomial.zero(), self
        quot = [Fraction(0)] * (dq + 1)
        inv_lead = 1 / div[-1]
        for k in range(dq, -1, -1):
            c = rem[k + len(div) - 1] * inv_lead
            quot[k] = c
            if c != 0:
                for j, b in enumerate(div):
                    rem[k + j] -= c * b
        return RationalPolynomial(quot), RationalPolynomial(rem[: len(div) - 1])

    def shift_down(self, k: int) -> "RationalPolynomial":
        """Exact division by x^k; raises if any of the low k coefficients is nonzero."""
        low = self.coeffs[:k]
        if any(c != 0 for c in low):
            raise ArithmeticError(f"x^{k} does not divide polynomial exactly")
        return RationalPolynomial(self.coeffs[k:])

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: Rational) -> Union[Fraction, float]:
        """Horner evaluation; exact if x is int/Fraction, float otherwise."""
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (int, Fraction)) else float(c))
        return acc

    def monic(self) -> "RationalPolynomial":
        if self.is_zero():
            return self
        return self * (1 / self.coeffs[-1])

    def __repr__(self) -> str:
        if self.is_zero():
            return "RationalPolynomial(0)"
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return "RationalPolynomial(" + " + ".join(terms) + ")"


def _series_coefficient(k: int) -> Fraction:
    """[(2k)! / (2^(2k) (k!)^2)]^2, the square of the normalized central binomial."""
    c = Fraction(math.comb(2 * k, k), 4**k)
    return c * c


def taylor_K15() -> RationalPolynomial:
    """Degree-15 Taylor truncation of K(m)/pi (the factor pi is NOT included).

    K(m) = pi * sum_k (1/2) [(2k)!/(2^(2k) (k!)^2)]^2 m^k, truncated at k = 15.
    Truncation underestimates K (all series coefficients are positive).
    """
    return RationalPolynomial([_series_coefficient(k) / 2 for k in range(16)])


def taylor_E15() -> RationalPolynomial:
    """Degree-15 Taylor truncation of E(m)/pi (the factor pi is NOT included).

    E(m) = pi * sum_k (1/2) [(2k)!/(2^(2k) (k!)^2)]^2 m^k / (1 - 2k), truncated
    at k = 15.  Truncation overestimates E (all omitted terms are negative).
    """
    return RationalPolynomial(
        [_series_coefficient(k) / (2 * (1 - 2 * k)) for k in range(16)]
    )


def derive_certificate() -> tuple[RationalPolynomial, RationalPolynomial]:
    """Exact numerator/denominator pair certifying g < 0 on (0, 1).

    Substituting the degree-15 truncations K15 = pi*k15 (a lower bound for K)
    and E15 = pi*e15 (an upper bound for E) into g pushes every term up, so

        g(x) <= pi * (3 e15^2 - (2-x) k15 e15 - (1-x) k15^2) / e15
              = pi * x^4 * P27(x) / Q15(x),

    where the numerator has an exact fourth-order root at 0.  Returns
    (P27, Q15), normalized so that P27(0) > 0 and Q15(0) < 0: both keep
    constant sign on [0, 1], making the bound negative there.

    Raises ArithmeticError if x^4 fails to divide the numerator exactly
    (which would signal a derivation bug).
    """
    k15 = taylor_K15()
    e15 = taylor_E15()
    two_minus_x = RationalPolynomial([2, -1])
    one_minus_x = RationalPolynomial([1, -1])
    numerator = 3 * (e15 * e15) - two_minus_x * (k15 * e15) - one_minus_x * (k15 * k15)
    p27 = -numerator.shift_down(4)
    q15 = -e15
    if p27.degree != 27 or q15.degree != 15:
        raise ArithmeticError(
            f"certificate degrees ({p27.degree}, {q15.degree}) != (27, 15)"
        )
    if not (p27[0] > 0 and q15[0] < 0):
        raise ArithmeticError("certificate sign normalization failed")
    return p27, q15


def _sign_variations(values: Sequence[Fraction]) -> int:
    signs = [1 if v > 0 else -1 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _poly_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    while not b.is_zero():
        _, r = divmod(a, b)
        # monic remainders keep the rational coefficients from exploding
        a, b = b, r.monic()
    return a


def sturm_constant_sign(p: RationalPolynomial, lo: Rational, hi: Rational) -> bool:
    """True iff p has no real root in the closed interval [lo, hi].

    Exact rational arithmetic throughout.  Endpoint roots are detected by
    direct evaluation; interior roots by the sign-variation count of the
    Sturm chain of the square-free part of p.
    """
    if p.is_zero():
        raise ValueError("polynomial must not be identically zero")
    a, b = Fraction(lo), Fraction(hi)
    if not a < b:
        raise ValueError(f"need lo < hi, got {a} >= {b}")
    if p(a) == 0 or p(b) == 0:
        return False
    sqfree = p
    g = _poly_gcd(p, p.derivative())
    if g.degree > 0:
        sqfree, _ = divmod(p, g)
    chain = [sqfree, sqfree.derivative()]
    while chain[-1].degree > 0:
        _, r = divmod(chain[-2], chain[-1])
        if r.is_zero():
            break
        chain.append(-r)
    va = _sign_variations([q(a) for q in chain])
    vb = _sign_variations([q(b) for q in chain])
    return va - vb == 0
