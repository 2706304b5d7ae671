"""Closed-form limit objects.

The semicircle family (density, CDF, moments, absolute mean, Stieltjes
transform), Catalan numbers, the theoretical moment sequences for the
block ensembles, Hankel positivity reports, and the Bessel-series
pseudo-characteristic function used in the no-limit argument for
unbalanced bipartite ensembles.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .spectral import eigenvalues_sym


class LawError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Catalan numbers and the semicircle family
# ---------------------------------------------------------------------------

def catalan(k: int) -> int:
    """Catalan number (2k)! / (k! (k+1)!), exact."""
    if k < 0:
        raise LawError("k must be nonnegative")
    return math.comb(2 * k, k) // (k + 1)


def mixing_radius(m: int, sigma1sq, sigma2sq) -> float:
    """Support radius sqrt((sigma1^2 + (m-1)*sigma2^2) / m) of the mixed limit."""
    if m < 2:
        raise LawError("mixing radius needs at least two parts")
    if sigma1sq < 0 or sigma2sq <= 0:
        raise LawError("variances out of range")
    return math.sqrt((sigma1sq + (m - 1) * sigma2sq) / m)


def semicircle_density(x, R: float):
    """Density 2/(pi R^2) sqrt(R^2 - x^2) on [-R, R]."""
    if R <= 0:
        raise LawError("radius must be positive")
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= R
    out = np.zeros_like(x)
    out[inside] = 2.0 / (math.pi * R**2) * np.sqrt(R**2 - x[inside] ** 2)
    return out if out.ndim else float(out)


def semicircle_cdf(x, R: float):
    """Closed-form semicircle CDF, clamped to [0, 1] outside the support."""
    if R <= 0:
        raise LawError("radius must be positive")
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -R, R)
    out = 0.5 + xc * np.sqrt(R**2 - xc**2) / (math.pi * R**2) \
        + np.arcsin(xc / R) / math.pi
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def semicircle_abs_mean(R: float) -> float:
    """E|X| = 4R/(3 pi) for the semicircle of radius R."""
    if R <= 0:
        raise LawError("radius must be positive")
    return 4.0 * R / (3.0 * math.pi)


def _even_moment_coeff(k: int) -> Fraction:
    # k!/(2^k (k/2)! (k/2+1)!) = Catalan(k/2) / 4^(k/2)
    h = k // 2
    return Fraction(math.factorial(k),
                    2**k * math.factorial(h) * math.factorial(h + 1))


def semicircle_moment(k: int, R):
    """k-th moment of the radius-R semicircle; 0 for odd k.

    Exact (Fraction) when R^2 terms are rational: the result is
    coeff * R^k with coeff = k!/(2^k (k/2)! (k/2+1)!).
    """
    if k < 0:
        raise LawError("k must be nonnegative")
    if R <= 0:
        raise LawError("radius must be positive")
    if k % 2 == 1:
        return 0 * R
    return _even_moment_coeff(k) * R**k


@dataclass(frozen=True)
class SemicircleLaw:
    """Semicircle distribution on [-R, R]."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise LawError("radius must be positive")

    def density(self, x):
        return semicircle_density(x, self.radius)

    def cdf(self, x):
        return semicircle_cdf(x, self.radius)

    def moment(self, k: int) -> float:
        return float(semicircle_moment(k, self.radius))

    def abs_mean(self) -> float:
        return semicircle_abs_mean(self.radius)

    def stieltjes(self, z: complex) -> complex:
        return semicircle_stieltjes(z, self.radius)


def semicircle_stieltjes(z: complex, R: float) -> complex:
    """Stieltjes transform of the radius-R semicircle for Im z > 0.

    Solves (R^2/4) S^2 + z S + 1 = 0 on the branch with S -> -1/z at
    infinity, i.e. S = 2(-z + sqrt(z^2 - R^2))/R^2 with the square root
    taken in the upper half plane.
    """
    if z.imag <= 0:
        raise LawError("Im z > 0 required")
    if R <= 0:
        raise LawError("radius must be positive")
    w = cmath.sqrt(z * z - R * R)
    if w.imag < 0:
        w = -w
    return 2.0 * (-z + w) / (R * R)


# ---------------------------------------------------------------------------
# theoretical moment sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentSequence:
    """Moments gamma_0..gamma_L with a provenance tag."""

    values: tuple
    provenance: str

    def __post_init__(self):
        if not self.values or self.values[0] != 1:
            raise LawError("gamma_0 must equal 1")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "gamma", "provenance"])
            for k, g in enumerate(self.values):
                w.writerow([k, repr(float(g)), self.provenance])


def gamma_main(k: int, m: int, sigma1sq, sigma2sq):
    """Limit moment for balanced partitions with parts of comparable size.

    0 for odd k; k!/(2^k (k/2)! (k/2+1)!) * f^k for even k, where
    f^2 = (sigma1^2 + (m-1) sigma2^2)/m.  Exact when the variances are
    Fractions.
    """
    if k < 0:
        raise LawError("k must be nonnegative")
    if m < 2:
        raise LawError("m must be at least 2")
    if k % 2 == 1:
        return Fraction(0) if isinstance(sigma1sq, Fraction) else 0.0
    radius_sq = (sigma1sq + (m - 1) * sigma2sq) / m
    return _even_moment_coeff(k) * radius_sq ** (k // 2)


def gamma_uniform(k: int, sigma2sq):
    """Limit moment when all part fractions vanish: semicircle of radius sigma2."""
    if k < 0:
        raise LawError("k must be nonnegative")
    if k % 2 == 1:
        return Fraction(0) if isinstance(sigma2sq, Fraction) else 0.0
    return _even_moment_coeff(k) * sigma2sq ** (k // 2)


def gamma_bipartite_printed(k: int, nu1, nu2, sigma2sq):
    """Bipartite zero-intra limit moments, reproduced exactly as printed.

    With nuhat = (nu1*nu2)^(1/4):
        0                                              for odd k,
        2 k! nuhat^k s^k / (2^k (k/2)! (k/2+1)!)       for k = 0 mod 4,
        k! nuhat^k s^k / (nuhat^2 2^k (k/2)! (k/2+1)!) for k = 2 mod 4.

    These printed values disagree with the exact walk-count limits (see
    walks.limit_gamma_walks); this function is kept as the verbatim record,
    the walk oracle is the ground truth.
    """
    if not (0 < nu1 < 1 and 0 < nu2 < 1):
        raise LawError("nu1, nu2 must lie in (0, 1)")
    if abs(nu1 + nu2 - 1) > 1e-12:
        raise LawError("nu1 + nu2 must equal 1")
    if k < 0:
        raise LawError("k must be nonnegative")
    if k % 2 == 1:
        return 0.0
    coeff = float(_even_moment_coeff(k))
    nuhat = (nu1 * nu2) ** 0.25
    sk = float(sigma2sq) ** (k / 2)
    if k % 4 == 0:
        return 2.0 * coeff * nuhat**k * sk
    return coeff * nuhat**k * sk / nuhat**2


def gamma_proposition_printed(j: int, m: int, nu1, nu2):
    """gamma_{2j} (j=1,2,3) for zero intra law, unit cross variance, as printed.

    Requires nu1 + (m-1) nu2 = 1 and m >= 3; returns the three published
    polynomial expressions verbatim.
    """
    if j not in (1, 2, 3):
        raise LawError("j must be 1, 2 or 3")
    if m < 3:
        raise LawError("m must be at least 3")
    if abs(nu1 + (m - 1) * nu2 - 1) > 1e-12:
        raise LawError("nu1 + (m-1)*nu2 must equal 1")
    a = nu1
    b = (m - 1) * nu2
    c = (m - 2) * nu2
    r = 1 - nu2
    if j == 1:
        return (a * b + b * r) / 4
    if j == 2:
        return 2 * (a * b * r + b * a * b + b * c * r) / 16
    return 5 * (a * b * a * b + a * b * c * r + b * a * b * r
                + b * c * a * b + b * c * c * r) / 64


def hankel_matrix(gammas, k: int) -> np.ndarray:
    """(k+1)x(k+1) Hankel moment matrix with entry (i, j) = gamma_{i+j}."""
    values = list(gammas.values if isinstance(gammas, MomentSequence) else gammas)
    if len(values) < 2 * k + 1:
        raise LawError(f"need moments up to order {2 * k}")
    return np.array([[float(values[i + j]) for j in range(k + 1)]
                     for i in range(k + 1)])


def hankel_report(gammas, k: int) -> dict:
    """Leading-minor determinants, minimum eigenvalue and a PSD verdict."""
    H = hankel_matrix(gammas, k)
    dets = [float(np.linalg.det(H[: r + 1, : r + 1])) for r in range(k + 1)]
    min_eig = float(eigenvalues_sym(H)[0])
    return {"determinants": dets, "min_eigenvalue": min_eig,
            "psd": min_eig >= -1e-10}


# ---------------------------------------------------------------------------
# Bessel series and the pseudo-characteristic function
# ---------------------------------------------------------------------------

def _bessel1_series(t: float, signed: bool) -> float:
    # sum_j s^j / (j! (j+1)!) (t/2)^(2j+1), s = -1 for J1, +1 for I1;
    # terms added until the relative term drops below 1e-16
    half = t / 2.0
    term = half
    total = term
    j = 0
    while True:
        j += 1
        term *= half * half / (j * (j + 1))
        contrib = -term if (signed and j % 2 == 1) else term
        total += contrib
        if abs(term) < 1e-16 * max(abs(total), 1e-300):
            return total


def bessel_j1(t: float) -> float:
    """Bessel function of the first kind, order 1, by power series."""
    return _bessel1_series(float(t), signed=True)


def bessel_i1(t: float) -> float:
    """Modified Bessel function of the first kind, order 1, by power series."""
    return _bessel1_series(float(t), signed=False)


def pseudo_char(t: float, nuhat: float, sigma2: float) -> float:
    """Would-be characteristic function of the unbalanced bipartite limit.

    f(t) = [(2 + 1/nuhat^2) J1(x)/x + (2 - 1/nuhat^2) I1(x)/x] / 2 with
    x = nuhat*sigma2*t, normalized so f(0) = 1.  A genuine characteristic
    function satisfies |f| <= 1; the I1 term eventually drives f below -1
    whenever nuhat^2 < 1/2, which is what find_negativity_witness hunts for.
    """
    if not 0 < nuhat < math.sqrt(0.5):
        raise LawError("nuhat must lie in (0, sqrt(1/2))")
    x = nuhat * sigma2 * float(t)
    if x == 0.0:
        return 1.0
    ca = 2.0 + 1.0 / nuhat**2
    cb = 2.0 - 1.0 / nuhat**2
    return 0.5 * (ca * bessel_j1(x) / x + cb * bessel_i1(x) / x)


def find_negativity_witness(nuhat: float, sigma2: float, t_max: float,
                            step: float = 0.01):
    """Smallest grid point t in (0, t_max] with pseudo_char(t) < -1, or None."""
    if not 0 < nuhat < math.sqrt(0.5):
        raise LawError("nuhat must lie in (0, sqrt(1/2))")
    if t_max > 60.0 / (nuhat * sigma2):
        raise LawError("t_max too large for the series budget")
    t = step
    while t <= t_max:
        if pseudo_char(t, nuhat, sigma2) < -1.0:
            return t
        t += step
    return None
