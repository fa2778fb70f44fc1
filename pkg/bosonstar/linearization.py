"""Linearized operators at the ground state, sector by sector.

In the angular momentum sector ell a perturbation is f(r) Y_ell(x/|x|) and
the operators act on the radial profile f. They are symmetric for the
weighted product <f, g> = 4 pi dr sum f g r^2:

    L_- = sqrt(-Laplacian_0) + 1 + V
    L_+,ell = sqrt(-Laplacian_ell) + 1 + V + W_ell

with V = -(Q^2 * |x|^-1) and the exchange kernel
(W_ell g)(r) = -(8 pi/(2 ell+1)) Q(r) int r_<^ell/r_>^(ell+1) Q(s) g(s) s^2 ds.
"""
import logging

import numpy as np
import scipy.linalg

from bosonstar.energetics import equation_residual
from bosonstar.miscellaneous import Record, parallel_map
from bosonstar.operators import multipole_sweep, newton_potential
from bosonstar.spectral_core import (BosonStarError, ConfigError, RadialField,
    _check_kind, forward_transform, norm, quadrature_3d, radial_derivative)


logger = logging.getLogger(__name__)

DEFAULT_RESIDUAL_TOL = 1e-6


class UnconvergedStateError(BosonStarError):
    pass


class NumericError(BosonStarError):
    pass


class SectorOperator:
    def __init__(self, ell, matrix, parts, grid, kind):
        self.ell = ell
        self.matrix = matrix
        self.parts = parts
        self.grid = grid
        self.kind = kind
        matrix.setflags(write=False)

    def __repr__(self):
        return "SectorOperator({}, ell={}, n={})".format(self.kind, self.ell, self.grid.n)

    def __matmul__(self, f):
        _check_kind(f, RadialField)
        return RadialField(self.grid, self.matrix @ f.values)

    def apply(self, f):
        return self @ f

    def asymmetry(self):
        """|A - A*|/|A| with A* the adjoint for the weighted product"""
        weighted = self.grid.weights[:, None]*self.matrix
        return float(np.linalg.norm(weighted - weighted.T)/np.linalg.norm(weighted))


def _check_converged(Q, residual_tol):
    _check_kind(Q, RadialField)
    residual = equation_residual(Q)
    if residual > residual_tol:
        raise UnconvergedStateError("ground state residual {:.3e} exceeds {:.1e}"
                                    .format(residual, residual_tol))
    return residual


def _eigh(matrix, what):
    try:
        return scipy.linalg.eigh(matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericError("eigendecomposition of {} failed: {}".format(what, e))


def _fd_laplacian(grid, ell):
    """Fourth order -d^2/dr^2 on g = r f with the parity (-1)^(ell+1) of
    g ~ r^(ell+1) across r = 0 and Dirichlet reflection at r_max, plus
    ell(ell+1)/r^2. Symmetric in the plain product on g."""
    n = grid.n
    h2 = grid.dr**2
    A = (np.diag(np.full(n, 30.0)) + np.diag(np.full(n-1, -16.0), 1)
         + np.diag(np.full(n-1, -16.0), -1) + np.diag(np.ones(n-2), 2)
         + np.diag(np.ones(n-2), -2))
    A[0, 0] += (-1)**(ell+1)
    A[-1, -1] -= 1
    return A/(12*h2) + np.diag(ell*(ell+1)/grid.r**2)


def kinetic_matrix(grid, ell):
    """sqrt(-Laplacian_ell) on radial profiles.

    ell = 0 conjugates the multiplier xi with the orthogonal sine matrix,
    which is exact on the grid. ell >= 1 takes the square root of the finite
    difference operator through its eigendecomposition.
    """
    r = grid.r
    if ell == 0:
        S = grid.sine_matrix
        root = S @ (grid.xi[:, None]*S)
    else:
        values, vectors = _eigh(_fd_laplacian(grid, ell), "-Laplacian_{}".format(ell))
        if values[0] < -1e-8*abs(values[-1]):
            raise NumericError("-Laplacian_{} has a negative eigenvalue {}".format(ell, values[0]))
        root = (vectors*np.sqrt(np.maximum(values, 0.0))) @ vectors.T
    return root*r[None, :]/r[:, None]


def exchange_matrix(Q, ell):
    """W_ell as a dense matrix, including the kink correction of the
    discrete Newton potential on the diagonal"""
    grid = Q.grid
    r = grid.r
    q = Q.values.real
    r_lo = np.minimum(r[:, None], r[None, :])
    r_hi = np.maximum(r[:, None], r[None, :])
    kernel = r_lo**ell/r_hi**(ell+1)
    W = -(8*np.pi/(2*ell+1))*q[:, None]*kernel*(q*grid.dr*r**2)[None, :]
    W[np.diag_indices(grid.n)] += 8*np.pi*grid.dr**2/12*q**2
    return W


def _potential(Q):
    return -newton_potential(Q.abs2().real).values


def assemble_Lminus(Q, residual_tol=DEFAULT_RESIDUAL_TOL):
    _check_converged(Q, residual_tol)
    grid = Q.grid
    kinetic = kinetic_matrix(grid, 0)
    V = _potential(Q)
    matrix = kinetic + np.eye(grid.n) + np.diag(V)
    return SectorOperator(0, matrix, Record(kinetic=kinetic, potential=V), grid, "L-")


def assemble_Lplus(Q, ell, residual_tol=DEFAULT_RESIDUAL_TOL):
    if int(ell) != ell or ell < 0:
        raise ConfigError("ell", "must be a nonnegative integer, got {!r}".format(ell))
    ell = int(ell)
    if ell > 2:
        logger.warning("sector ell=%d is outside the tested range 0..2", ell)
    _check_converged(Q, residual_tol)
    grid = Q.grid
    kinetic = kinetic_matrix(grid, ell)
    V = _potential(Q)
    W = exchange_matrix(Q, ell)
    matrix = kinetic + np.eye(grid.n) + np.diag(V) + W
    return SectorOperator(ell, matrix, Record(kinetic=kinetic, potential=V, exchange=W),
                          grid, "L+")


def _symmetrized(op, matrix=None):
    matrix = op.matrix if matrix is None else matrix
    root = np.sqrt(op.grid.weights)
    B = root[:, None]*matrix/root[None, :]
    return (B + B.T)/2, root


def sector_spectrum(op):
    """Eigenvalues in ascending order"""
    B, _ = _symmetrized(op)
    return scipy.linalg.eigh(B, eigvals_only=True)


def kernel_scan(op, threshold):
    """Eigenpairs with |eigenvalue| < threshold, eigenvectors of unit
    weighted norm"""
    B, root = _symmetrized(op)
    values, vectors = _eigh(B, repr(op))
    found = []
    for k in np.flatnonzero(np.abs(values) < threshold):
        x = vectors[:, k]/root
        x = x/np.sqrt(np.sum(op.grid.weights*x**2))
        if x[np.argmax(np.abs(x))] < 0:
            x = -x
        found.append((float(values[k]), RadialField(op.grid, x)))
    logger.info("%r: %d eigenvalue(s) below %.1e", op, len(found), threshold)
    return found


def weighted_operator_norm(matrix, grid):
    root = np.sqrt(grid.weights)
    return float(np.linalg.norm(root[:, None]*matrix/root[None, :], 2))


def kinetic_form(op_or_matrix, f, grid=None):
    """<f, K f> in the weighted product"""
    matrix = op_or_matrix.matrix if isinstance(op_or_matrix, SectorOperator) else op_or_matrix
    grid = f.grid if grid is None else grid
    return float(np.sum(grid.weights*f.values*(matrix @ f.values)))


def cosine_similarity(f, g):
    return float(quadrature_3d(f*g)/(norm(f)*norm(g)))


def translation_mode(Q, method="spectral"):
    return radial_derivative(Q, method)


def scaling_mode(Q, method="spectral"):
    """R = (3/2) Q + r Q', the derivative of mu -> mu^(3/2) Q(mu x) at mu = 1"""
    return 1.5*Q + radial_derivative(Q, method)*Q.grid.r


def zero_mode_residuals(Q, method="spectral", residual_tol=DEFAULT_RESIDUAL_TOL):
    """|L_- Q|/|Q|, |L_+,1 Q'|/|Q'| and |L_+,0 R + Q|/|Q|"""
    Lminus = assemble_Lminus(Q, residual_tol)
    L1 = assemble_Lplus(Q, 1, residual_tol)
    L0 = assemble_Lplus(Q, 0, residual_tol)
    dQ = translation_mode(Q, method)
    R = scaling_mode(Q, method)
    return Record(lminus=float(norm(Lminus @ Q)/norm(Q)),
                  translation=float(norm(L1 @ dQ)/norm(dQ)),
                  scaling=float(norm(L0 @ R + Q)/norm(Q)),
                  derivative=method)


def multipole_potential(rho, ell):
    """Radial profile of (rho(|y|) Y_ell) * |x|^-1, i.e.
    (4 pi/(2 ell+1)) int r_<^ell/r_>^(ell+1) rho(s) s^2 ds"""
    _check_kind(rho, RadialField)
    if int(ell) != ell or ell < 0:
        raise ConfigError("ell", "must be a nonnegative integer, got {!r}".format(ell))
    return RadialField(rho.grid, multipole_sweep(rho.grid, rho.values.real, int(ell)))


def kernel_element_decay(v, Q):
    """l1 norm and Fourier sup of a kernel candidate; both must be finite"""
    _check_kind(v, RadialField)
    _check_kind(Q, RadialField)
    l1 = float(quadrature_3d(abs(v)))
    fourier_sup = float(np.max(np.abs(forward_transform(v).values)))
    return Record(l1_norm=l1, l1_norm_finite=bool(np.isfinite(l1)),
                  fourier_sup=fourier_sup)


def sectors_report(Q, ells=(0, 1, 2), threshold=None, residual=None, processes=None):
    """Spectra and kernel scans of L_- and L_+,ell. The threshold defaults to
    10 times the ground state residual (at least 1e-10)."""
    residual = equation_residual(Q) if residual is None else residual
    threshold = 10*max(residual, 1e-11) if threshold is None else threshold

    def sector(ell):
        op = assemble_Lplus(Q, ell)
        spectrum = sector_spectrum(op)
        scan = [value for value, _ in kernel_scan(op, threshold)]
        return Record(ell=ell, operator="L+", eigenvalues=spectrum,
                      near_zero=scan, asymmetry=op.asymmetry())

    sectors = parallel_map(sector, list(ells), processes)
    Lminus = assemble_Lminus(Q)
    sectors.append(Record(ell=0, operator="L-", eigenvalues=sector_spectrum(Lminus),
                          near_zero=[value for value, _ in kernel_scan(Lminus, threshold)],
                          asymmetry=Lminus.asymmetry()))
    return Record(threshold=threshold, sectors=sectors)
