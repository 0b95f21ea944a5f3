"""Coalescence curves, the triple point, and phase-plane classification.

Everything here lives in the scaled coordinates d_tilde = d/delta and
gamma_tilde = gamma/delta, where the two second-order coalescence curves and
their triple-point endpoint sit at fixed positions.  The discriminant
p^3 + q^2 of the eigenvalue cubic changes sign exactly on the curves, which is
what both the classifier and the numeric curve locator exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateFitError, DomainError, NoRootError
from .model import ModelParams
from .spectrum import cardano_params, eigenvalues_closed_form

D_TILDE_EP3 = 2.0 * math.sqrt(2.0)
GAMMA_TILDE_EP3 = 6.0 * math.sqrt(3.0)
Z_EP3 = -4j * math.sqrt(3.0)

# Relative half-width of the |disc| band that earns a coalescence label.  The
# discriminant scales as the sixth power of energy, so the band uses the cube
# of the squared energy scale.
EP_BAND = 1e-10

# Looser smallness test on p and q themselves (scaled) that upgrades a point
# inside the band to the triple-point label.  Wide enough that inputs rounded
# to a handful of significant digits still classify as the triple point.
EP3_BAND = 1e-5


class Region(Enum):
    """Eigenvalue configuration at one point of the phase plane."""

    SPLIT_PAIR = "SplitPair"
    ALL_IMAGINARY = "AllImaginary"
    EP2_MINUS = "EP2Minus"
    EP2_PLUS = "EP2Plus"
    EP3 = "EP3"


@dataclass(frozen=True)
class PhasePoint:
    """Scaled coordinates, discriminant value and region label of one point.

    ``ordering`` is sign(Im z1 - Im z2), a plotting aid that distinguishes the
    two split-pair layouts without asserting which is which.
    """

    d_tilde: float
    gamma_tilde: float
    disc: float
    region: Region
    ordering: int


@dataclass(frozen=True)
class EPCurvePoint:
    """Both coalescence branches at one drive value, in units of the detuning."""

    d_tilde: float
    gamma_tilde_minus: float
    gamma_tilde_plus: float
    z_ep2_minus: complex
    z_ep2_plus: complex


def discriminant(params: ModelParams) -> float:
    """p^3 + q^2 of the eigenvalue cubic; zero exactly on the coalescence set."""
    return cardano_params(params).disc


def scaled_discriminant(params: ModelParams) -> float:
    """Discriminant divided by its natural sixth-power energy scale."""
    return discriminant(params) / max(1.0, params.energy_scale() ** 3)


def ep2_gamma(d_tilde: float) -> tuple[float, float]:
    """The two coalescence couplings at drive ``d_tilde``, in units of the detuning.

    Real solutions exist only for d_tilde >= 2 sqrt(2); the two branches merge
    there at 6 sqrt(3).  Returned as (gamma_minus, gamma_plus) with
    gamma_minus <= gamma_plus.
    """
    d_tilde = float(d_tilde)
    if not d_tilde >= D_TILDE_EP3:
        raise DomainError(
            f"no real coalescence curves below d_tilde = 2*sqrt(2); got {d_tilde}"
        )
    core = d_tilde**4 / 2.0 + 10.0 * d_tilde**2 - 4.0
    wing = 0.5 * d_tilde * max(d_tilde**2 - 8.0, 0.0) ** 1.5
    return math.sqrt(core - wing), math.sqrt(core + wing)


def ep2_eigenvalue(d_tilde: float, branch: str) -> complex:
    """Coalesced eigenvalue on one branch of the curves, in units of the detuning.

    Equal to -(2i/3) (gamma_tilde - (3/2) cbrt(q)) with q evaluated on the
    curve; the cube root is carried by the inner radical below, whose sign
    follows sign(q), positive on the plus branch and negative on the minus
    branch.  Pure imaginary by construction.  The inner radicand is checked
    rather than assumed nonnegative; a tiny negative from roundoff is clamped,
    anything larger raises.
    """
    if branch not in ("minus", "plus"):
        raise DomainError(f"branch must be 'minus' or 'plus', got {branch!r}")
    gamma_minus, gamma_plus = ep2_gamma(d_tilde)
    sign = -1.0 if branch == "minus" else 1.0
    gamma_t = gamma_minus if branch == "minus" else gamma_plus
    inner = (
        d_tilde**4 / 2.0
        - 2.0 * d_tilde**2
        - 16.0
        + sign * 0.5 * d_tilde * max(d_tilde**2 - 8.0, 0.0) ** 1.5
    )
    if inner < -1e-9 * max(1.0, d_tilde**4):
        raise DomainError(
            f"inner radicand {inner:.3e} is negative on the {branch} branch "
            f"at d_tilde = {d_tilde}; curve formula invalid here"
        )
    inner = max(inner, 0.0)
    return (-2j / 3.0) * (gamma_t - sign * 0.25 * math.sqrt(inner))


def ep_curve_point(d_tilde: float) -> EPCurvePoint:
    """Both branches of the coalescence curves at one drive value."""
    gm, gp = ep2_gamma(d_tilde)
    return EPCurvePoint(
        d_tilde=float(d_tilde),
        gamma_tilde_minus=gm,
        gamma_tilde_plus=gp,
        z_ep2_minus=ep2_eigenvalue(d_tilde, "minus"),
        z_ep2_plus=ep2_eigenvalue(d_tilde, "plus"),
    )


def ep3_point() -> tuple[float, float, complex]:
    """Drive, coupling and eigenvalue of the triple coalescence (units of detuning)."""
    return D_TILDE_EP3, GAMMA_TILDE_EP3, Z_EP3


def classify(params: ModelParams) -> PhasePoint:
    """Eigenvalue-configuration label at one parameter point.

    Regions follow the discriminant sign: positive means one imaginary
    eigenvalue plus a pair mirrored about the imaginary axis, negative means
    all three decaying eigenvalues imaginary.  A relative band around zero is
    reserved for the coalescence labels; inside it the triple point is
    recognised by p and q themselves being small, and the two second-order
    branches are told apart by which curve the point sits nearer.
    """
    if params.delta == 0:
        raise DomainError("phase-plane classification needs delta != 0 "
                          "(coordinates are d/delta and gamma/delta)")
    d_t, g_t = params.scaled()
    cp = cardano_params(params)
    scale2 = max(1.0, params.energy_scale())
    band = EP_BAND * scale2**3

    zs = eigenvalues_closed_form(params).eigenvalues
    imdiff = zs[1].imag - zs[2].imag
    if abs(imdiff) <= 1e-12 * max(1.0, abs(zs[1]), abs(zs[2])):
        ordering = 0
    else:
        ordering = 1 if imdiff > 0 else -1

    if abs(cp.disc) > band:
        region = Region.SPLIT_PAIR if cp.disc > 0 else Region.ALL_IMAGINARY
    elif max(abs(cp.p), abs(cp.q) ** (2.0 / 3.0)) <= EP3_BAND * scale2:
        region = Region.EP3
    else:
        try:
            gm, gp = ep2_gamma(abs(d_t))
            midpoint = 0.5 * (gm + gp)
        except DomainError:
            # Below the drive threshold the band can only be entered near the
            # triple point; split on the coupling side of it.
            midpoint = GAMMA_TILDE_EP3
        region = Region.EP2_MINUS if abs(g_t) <= midpoint else Region.EP2_PLUS
    return PhasePoint(d_tilde=d_t, gamma_tilde=g_t, disc=cp.disc,
                      region=region, ordering=ordering)


def _disc_quadratic_coeffs(d_tilde: float) -> tuple[float, float, float]:
    """Exact coefficients of the discriminant as a quadratic in x = gamma^2.

    At unit detuning, p^3 + q^2 = c0 + c1 x + c2 x^2: the cubic terms of p^3
    and q^2 in x cancel identically.  Used only to seed brackets; the searches
    themselves evaluate the discriminant directly.
    """
    a = 1.0 + d_tilde**2
    b = 1.0 - d_tilde**2 / 2.0
    c0 = a**3 / 27.0
    c1 = (3.0 * b**2 - a**2) / 108.0
    c2 = 1.0 / 432.0
    return c0, c1, c2


def _bisect_sign(f, lo: float, hi: float) -> float:
    """Bisection to the last representable float; requires a sign change."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NoRootError(f"no sign change over [{lo}, {hi}]")
    while True:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm


def ep2_locate_numeric(d_tilde: float) -> tuple[float, float]:
    """Coalescence couplings by bracketed bisection on the discriminant sign.

    Oracle for :func:`ep2_gamma`: only directly evaluated discriminant signs
    drive the search.  Raises :class:`NoRootError` when no negative dip exists
    (drive below threshold).
    """
    d_tilde = float(d_tilde)
    c0, c1, c2 = _disc_quadratic_coeffs(d_tilde)
    x_star = -c1 / (2.0 * c2)

    def disc_at(x: float) -> float:
        return discriminant(ModelParams(1.0, d_tilde, math.sqrt(x)))

    if x_star <= 0.0 or disc_at(x_star) >= 0.0:
        raise NoRootError(
            f"discriminant has no negative dip at d_tilde = {d_tilde}; "
            "no coalescence coupling exists"
        )
    hi = 2.0 * x_star
    for _ in range(64):
        if disc_at(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NoRootError("failed to bracket the upper coalescence coupling")
    x_minus = _bisect_sign(disc_at, 0.0, x_star)
    x_plus = _bisect_sign(disc_at, x_star, hi)
    return math.sqrt(x_minus), math.sqrt(x_plus)


def ep3_locate_numeric(d_lo: float = 2.0, d_hi: float = 3.5) -> tuple[float, float, complex]:
    """Locate the curve-merging point by bisection on existence of the negative dip.

    Returns the scaled drive and coupling of the endpoint and the triple
    eigenvalue there (from the exactly known mean of the three decaying
    roots).  Everything is derived from discriminant signs, independent of the
    closed-form curve expressions.
    """

    def dip_depth(d_t: float) -> float:
        c0, c1, c2 = _disc_quadratic_coeffs(d_t)
        x_star = -c1 / (2.0 * c2)
        if x_star <= 0.0:
            return c0
        return discriminant(ModelParams(1.0, d_t, math.sqrt(x_star)))

    if not (dip_depth(d_lo) > 0.0 and dip_depth(d_hi) < 0.0):
        raise NoRootError(f"[{d_lo}, {d_hi}] does not bracket the curve endpoint")
    d_t = _bisect_sign(dip_depth, d_lo, d_hi)
    _, c1, c2 = _disc_quadratic_coeffs(d_t)
    gamma_t = math.sqrt(-c1 / (2.0 * c2))
    return d_t, gamma_t, -2j * gamma_t / 3.0


def splitting_exponent(base: PhasePoint, direction, epsilons) -> float:
    """Least-squares slope of log(gap) versus log(eps) for perturbations off an EP.

    The gap is |z2 - z3| off a second-order point and the largest pairwise
    distance among the three decaying eigenvalues off the triple point.
    Expected slopes for directions transverse to the curves: 1/2 and 1/3.

    Raises :class:`DegenerateFitError` when fewer than two usable points
    remain after dropping nonpositive epsilons and underflowed gaps.
    """
    if base.region not in (Region.EP2_MINUS, Region.EP2_PLUS, Region.EP3):
        raise DomainError("base point must carry an exceptional-point label")
    ux, uy = float(direction[0]), float(direction[1])
    norm = math.hypot(ux, uy)
    if norm == 0.0:
        raise DomainError("direction must be a nonzero vector")
    ux, uy = ux / norm, uy / norm
    logs = []
    for eps in epsilons:
        eps = float(eps)
        if eps <= 0.0:
            continue
        params = ModelParams(
            1.0, base.d_tilde + eps * ux, base.gamma_tilde + eps * uy
        )
        zz = eigenvalues_closed_form(params).eigenvalues[1:]
        pairwise = (abs(zz[0] - zz[1]), abs(zz[0] - zz[2]), abs(zz[1] - zz[2]))
        if base.region is Region.EP3:
            gap = max(pairwise)
        else:
            # The coalescing pair is the closest one; fixed labels can swap
            # across the curves under the cube-root branch convention.
            gap = min(pairwise)
        if gap > 1e-12:
            logs.append((math.log(eps), math.log(gap)))
    if len(logs) < 2:
        raise DegenerateFitError(
            "fewer than two usable (eps, gap) points; cannot fit an exponent"
        )
    x = np.array([pt[0] for pt in logs])
    y = np.array([pt[1] for pt in logs])
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)
