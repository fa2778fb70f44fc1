import logging
import math

import numpy as np

from bosonstar.miscellaneous import Record
from bosonstar.operators import hartree_term, radial_convolution
from bosonstar.spectral_core import (BosonStarError, ConfigError,
    DegenerateFieldError, RadialField, SpectralField, _check_kind,
    forward_transform, inverse_transform, quadrature_3d, radial_derivative,
    spectral_quadrature_3d)


logger = logging.getLogger(__name__)

ALPHA = 1/(2*np.pi**2)
FAR_FIELD_BAND = (0.4, 0.85)
DEFAULT_FAR_FIELD_WINDOW = (0.4, 0.8)
DEFAULT_FOURIER_WINDOW = (5.0, 15.0)
ABEL_MAX_N = 60
TOP_BAND = 0.05


class WindowError(BosonStarError, ValueError):
    pass


class PremiseViolation(BosonStarError):
    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = list(indices)


class CertificateFailure(BosonStarError):
    def __init__(self, message, n):
        super().__init__(message)
        self.n = n


class DecayFitReport(Record):
    pass


class AnalyticityCertificate(Record):
    pass


def _image_basis(r, r_max, images):
    """r^-4 and -(1/4) d(r^-4)/dr = r^-5, summed over the Dirichlet images
    of g = r u when `images`"""
    shifts = np.arange(-3, 4) if images else np.zeros(1)
    d = r[:, None] - 2*shifts[None, :]*r_max
    phi = np.sum(d**-3.0, axis=1)/r
    dphi = -phi/r - 3*np.sum(d**-4.0, axis=1)/r
    return phi, -dphi/4


def _lstsq_constant(y, basis):
    return float(np.dot(y, basis)/np.dot(basis, basis))


def fit_far_field(u, f, window=None, images=True):
    """Far field of u = (sqrt(-Laplacian) + 1)^-1 f.

    r^4 u(r) -> pi^-2 int f and r^5 u'(r) -> -4 pi^-2 int f. The constants
    are least squares fits over the window; by default the basis carries
    the Dirichlet images at r_max of the truncated grid.
    """
    _check_kind(u, RadialField)
    _check_kind(f, RadialField)
    grid = u.grid
    if window is None:
        window = tuple(w*grid.r_max for w in DEFAULT_FAR_FIELD_WINDOW)
    r_lo, r_hi = window
    lo, hi = (b*grid.r_max for b in FAR_FIELD_BAND)
    if not (lo*(1-1e-12) <= r_lo < r_hi <= hi*(1+1e-12)):
        raise WindowError("window {} is outside [{:g}, {:g}]".format(window, lo, hi))
    mask = (grid.r >= r_lo) & (grid.r <= r_hi)
    if np.count_nonzero(mask) < 2:
        raise WindowError("window {} holds fewer than 2 nodes".format(window))

    r = grid.r[mask]
    phi, chi = _image_basis(r, grid.r_max, images)
    du = radial_derivative(u, "centered").values.real[mask]
    c4_est = _lstsq_constant(u.values.real[mask], phi)
    c5_est = _lstsq_constant(du, chi)
    mass = float(quadrature_3d(f).real)
    c4_theory = mass/np.pi**2
    c5_theory = -4*mass/np.pi**2

    def rel_err(est, theory):
        return abs(est - theory)/abs(theory) if theory else float("inf")

    return DecayFitReport(c4_est=c4_est, c4_theory=c4_theory, c5_est=c5_est,
                          c5_theory=c5_theory, window=(float(r_lo), float(r_hi)),
                          rel_err_4=rel_err(c4_est, c4_theory),
                          rel_err_5=rel_err(c5_est, c5_theory), images=images)


def _slope_fit(xi, logs):
    slope, intercept = np.polyfit(xi, logs, 1)
    predicted = slope*xi + intercept
    total = np.sum((logs - logs.mean())**2)
    r_squared = 1 - np.sum((logs - predicted)**2)/total if total > 0 else 1.0
    return slope, r_squared


def fit_fourier_decay(uhat, window=DEFAULT_FOURIER_WINDOW, min_points=4):
    """Least squares fit of log u_hat(xi) = c - sigma xi over the window.

    The window is cut at the first nonpositive sample. Slopes of the two
    halves more than 20% apart classify the decay as super-exponential.
    """
    _check_kind(uhat, SpectralField)
    xi_lo, xi_hi = window
    xi = uhat.grid.xi
    values = uhat.values.real
    selected = np.flatnonzero((xi >= xi_lo) & (xi <= xi_hi))
    if len(selected) == 0:
        raise WindowError("no frequency node in {}".format(window))
    bad = np.flatnonzero(values[selected] <= 0)
    if len(bad):
        logger.warning("nonpositive u_hat at xi = %g, window shrinks to (%g, %g)",
                       xi[selected[bad[0]]], xi_lo, xi[selected[max(bad[0]-1, 0)]])
        selected = selected[:bad[0]]
    if len(selected) < min_points:
        raise WindowError("window {} keeps {} usable nodes".format(window, len(selected)))

    x = xi[selected]
    logs = np.log(values[selected])
    slope, r_squared = _slope_fit(x, logs)
    half = len(x)//2
    slope_lo, _ = _slope_fit(x[:half], logs[:half])
    slope_hi, _ = _slope_fit(x[half:], logs[half:])
    spread = abs(slope_hi - slope_lo)/max(abs(slope_lo), abs(slope_hi))
    return Record(sigma_est=float(-slope), r_squared=float(r_squared),
                  classification="super-exponential" if spread > 0.2 else "exponential",
                  half_slopes=(float(-slope_lo), float(-slope_hi)),
                  window=(float(x[0]), float(x[-1])))


def abel_identity(n, a, b):
    """sum_l C(n,l) (l+a)^(l-1) (n-l+b)^(n-l-1) = ((a+b)/(ab)) (n+a+b)^(n-1)"""
    if int(n) != n or n < 0:
        raise ConfigError("n", "must be a nonnegative integer, got {!r}".format(n))
    if n > ABEL_MAX_N:
        raise ConfigError("n", "must be at most {} in double precision, got {}"
                          .format(ABEL_MAX_N, n))
    if not (a > 0 and b > 0):
        raise ConfigError("a, b", "must be positive, got {!r}, {!r}".format(a, b))
    n = int(n)
    lhs = math.fsum(math.comb(n, l)*(l+a)**(l-1)*(n-l+b)**(n-l-1) for l in range(n+1))
    rhs = (a+b)/(a*b)*(n+a+b)**(n-1)
    abs_err = abs(lhs - rhs)
    return Record(lhs=lhs, rhs=rhs, abs_err=abs_err, rel_err=abs_err/abs(rhs))


def moment_bound(certificate, n, f_sup):
    return certificate.a*certificate.b**n*(2*n+1)**(n-1)*f_sup


def moment_growth_table(uhat, n_max=12, certificate=None):
    """Rows (n, max xi^n f, a b^n (2n+1)^(n-1) max f, ratio) with f = |u_hat|"""
    _check_kind(uhat, SpectralField)
    if certificate is None:
        certificate = certify_analyticity(uhat, checked_n=n_max)
    f = np.abs(uhat.values)
    xi = uhat.grid.xi
    f_sup = float(np.max(f))
    rows = []
    for n in range(n_max+1):
        measured = float(np.max(xi**n*f))
        bound = float(moment_bound(certificate, n, f_sup))
        rows.append((n, measured, bound, measured/bound))
    return rows


def _premise_check(uhat, f, w, residual):
    """(xi+1) f <= W*f + eps on the grid, with W*f evaluated as
    |FT F(u)| + (|w|*f - |w*u_hat|) so that an exact solution passes"""
    grid = uhat.grid
    u = inverse_transform(uhat)
    FTF = np.abs(forward_transform(hartree_term(u)).values)
    W = abs(w)
    gap = radial_convolution(W, abs(uhat)).values.real - np.abs(radial_convolution(w, uhat).values)
    lhs = (grid.xi + 1)*f
    rhs = FTF + np.maximum(gap, 0.0)
    eps = 10*max(residual, 1e-12)*np.max(lhs)
    violations = np.flatnonzero(lhs > rhs + eps)
    return violations, float(np.max(lhs - rhs)), eps


def certify_analyticity(uhat, checked_n=12, residual=1e-8):
    """Constants (a, b, sigma) with max |xi|^n f <= a b^n (2n+1)^(n-1) max f
    for f = |u_hat|, so that u_hat decays like exp(-sigma |xi|).

    The premise (|xi|+1) f <= W*f, W = |w|, w = (u_hat*u_hat)/(2 pi^2 xi^2), is
    checked first: if it fails below the top 5% of the frequency band the
    input is not a solution and PremiseViolation is raised. A failing moment
    bound raises CertificateFailure with the offending n.

    `residual` is the equation residual the input was solved to; the
    premise tolerance is 10 residual max((xi+1) f).
    """
    _check_kind(uhat, SpectralField)
    grid = uhat.grid
    xi = grid.xi
    f = np.abs(uhat.values)
    if not np.any(f > 0):
        raise DegenerateFieldError("no certificate for the zero function")
    w = radial_convolution(uhat, uhat)*(ALPHA/xi**2)

    violations, worst, eps = _premise_check(uhat, f, w, residual)
    if len(violations):
        top = violations >= int(np.floor((1-TOP_BAND)*grid.n))
        if np.all(top):
            logger.warning("premise fails at %d node(s) in the top %d%% of the band "
                           "(xi >= %g)", len(violations), int(TOP_BAND*100), xi[violations[0]])
        else:
            first = violations[~top][0]
            raise PremiseViolation("(xi+1) f <= W*f fails at {} node(s), first at xi = {:g} "
                                   "(excess {:.3e} > eps {:.3e}): not a solution"
                                   .format(np.count_nonzero(~top), xi[first], worst, eps),
                                   violations)

    W = SpectralField(grid, np.abs(w.values))
    W_l1 = float(spectral_quadrature_3d(W))
    xiW_l1 = float(spectral_quadrature_3d(W*xi))
    f_l1 = float(spectral_quadrature_3d(SpectralField(grid, f)))
    f_sup = float(np.max(f))
    lam = 1.0
    c = math.sqrt(W_l1/(ALPHA*f_l1**2))
    a = max(W_l1/lam, xiW_l1/(2*ALPHA*c*f_l1**2), ALPHA*c**3*f_l1**2)
    b = a/c
    certificate = AnalyticityCertificate(
        a=a, b=b, c=c, sigma=1/(2*b*math.e), alpha=ALPHA, lam=lam,
        norms=Record(W_l1=W_l1, xiW_l1=xiW_l1, f_l1=f_l1, f_sup=f_sup),
        premise_residual=float(residual), premise_eps=eps,
        premise_top_band_violations=int(len(violations)), checked_n=checked_n)

    for n in range(checked_n+1):
        measured = float(np.max(xi**n*f))
        bound = moment_bound(certificate, n, f_sup)
        if measured > bound:
            raise CertificateFailure("moment bound fails at n = {}: {:.6e} > {:.6e}"
                                     .format(n, measured, bound), n)
    logger.info("analyticity certificate: a=%.6g b=%.6g sigma=%.6g", a, b, certificate.sigma)
    return certificate
