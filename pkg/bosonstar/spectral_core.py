"""Radial grid, fields and the discrete radial Fourier transform pair.

Radial functions on R^3 are sampled at the interior nodes r_j = j*dr,
j = 1..n, of [0, r_max] with dr = r_max/(n+1). The dual frequency nodes are
xi_k = k*pi/r_max. Through g = r*u the three dimensional radial transform
becomes a type-I sine transform, and the grid condition
dr*dxi*(n+1) = pi makes the discrete pair exactly inverse.
"""
from functools import cached_property
import logging

import numpy as np
import scipy.fft
from scipy.interpolate import PchipInterpolator

from bosonstar.file_handling import read_columns, write_columns


logger = logging.getLogger(__name__)

_SQRT_2_OVER_PI = np.sqrt(2/np.pi)


class BosonStarError(Exception):
    pass


class ConfigError(BosonStarError, ValueError):
    """A parameter is outside its documented range. `key` names it."""
    def __init__(self, key, message):
        super().__init__("{}: {}".format(key, message))
        self.key = key


class GridMismatchError(BosonStarError, ValueError):
    pass


class NonFiniteError(BosonStarError, ValueError):
    pass


class DegenerateFieldError(BosonStarError, ValueError):
    """Raised where a quantity is undefined for the zero field"""
    pass


class RadialGrid:
    def __init__(self, n=2048, r_max=200.0):
        if int(n) != n or n < 1:
            raise ConfigError("n", "must be a positive integer, got {!r}".format(n))
        if not np.isfinite(r_max) or r_max <= 0:
            raise ConfigError("r_max", "must be positive, got {!r}".format(r_max))
        self.n = int(n)
        self.r_max = float(r_max)
        self.dr = self.r_max/(self.n+1)
        self.dxi = np.pi/self.r_max

    def __repr__(self):
        return "RadialGrid(n={}, r_max={!r})".format(self.n, self.r_max)

    def __eq__(self, other):
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return self.n == other.n and self.r_max == other.r_max

    def __hash__(self):
        return hash((self.n, self.r_max))

    def _readonly(self, array):
        array.setflags(write=False)
        return array

    @cached_property
    def r(self):
        return self._readonly(np.arange(1, self.n+1)*self.dr)

    @cached_property
    def xi(self):
        return self._readonly(np.arange(1, self.n+1)*self.dxi)

    @cached_property
    def weights(self):
        """Trapezoid weights of the 3D integral in position space"""
        return self._readonly(4*np.pi*self.dr*self.r**2)

    @cached_property
    def spectral_weights(self):
        return self._readonly(4*np.pi*self.dxi*self.xi**2)

    @cached_property
    def sine_matrix(self):
        """Orthogonal symmetric matrix sqrt(2/(n+1)) sin(pi*j*k/(n+1))"""
        jk = np.outer(np.arange(1, self.n+1), np.arange(1, self.n+1))
        S = np.sqrt(2/(self.n+1))*np.sin(np.pi*jk/(self.n+1))
        return self._readonly(S)

    def refined(self, factor=2):
        return RadialGrid(self.n*factor, self.r_max)

    def to_dict(self):
        return {"n": self.n, "r_max": self.r_max}


class _Field:
    """Samples of a radial function on one of the two node sets of a grid.
    Values are stored read-only; arithmetic returns new fields, also with an
    ndarray on the left (array * field goes through __rmul__)."""
    _axis = None
    __array_ufunc__ = None

    def __init__(self, grid, values):
        values = np.array(values)
        if values.dtype.kind not in "fc":
            values = values.astype(float)
        if values.shape != (grid.n,):
            raise GridMismatchError("{} expects {} values, got shape {}"
                                    .format(type(self).__name__, grid.n, values.shape))
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("{} has non-finite samples".format(type(self).__name__))
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def __repr__(self):
        return "{}({!r}, <{} values>)".format(type(self).__name__, self.grid, self.grid.n)

    @property
    def nodes(self):
        return getattr(self.grid, self._axis)

    @property
    def is_complex(self):
        return np.iscomplexobj(self.values)

    @property
    def real(self):
        return type(self)(self.grid, self.values.real)

    @property
    def imag(self):
        return type(self)(self.grid, self.values.imag)

    def conj(self):
        return type(self)(self.grid, self.values.conj())

    def _other_values(self, other):
        if isinstance(other, _Field):
            if type(other)._axis != self._axis:
                raise GridMismatchError("cannot combine {} with {}"
                                        .format(type(self).__name__, type(other).__name__))
            if other.grid != self.grid:
                raise GridMismatchError("{!r} != {!r}".format(self.grid, other.grid))
            return other.values
        return other

    def with_values(self, values):
        return type(self)(self.grid, values)

    def __add__(self, other):
        return self.with_values(self.values + self._other_values(other))
    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._other_values(other))

    def __rsub__(self, other):
        return self.with_values(self._other_values(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._other_values(other))
    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._other_values(other))

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def abs2(self):
        return self.with_values(np.abs(self.values)**2)


class RadialField(_Field):
    _axis = "r"


class SpectralField(_Field):
    _axis = "xi"


def _check_kind(field, kind):
    if not isinstance(field, kind):
        raise GridMismatchError("expected a {}, got {}"
                                .format(kind.__name__, type(field).__name__))


def _sine_sum(x):
    """sum_j x_j sin(pi*j*k/(n+1)), k = 1..n"""
    if np.iscomplexobj(x):
        return _sine_sum(x.real) + 1j*_sine_sum(x.imag)
    return scipy.fft.dst(x, type=1)/2


def _cosine_sum(x):
    """sum_k x_k cos(pi*j*k/(n+1)), j = 1..n"""
    if np.iscomplexobj(x):
        return _cosine_sum(x.real) + 1j*_cosine_sum(x.imag)
    padded = np.concatenate(([0.0], x, [0.0]))
    return scipy.fft.dct(padded, type=1)[1:-1]/2


def forward_transform(u):
    _check_kind(u, RadialField)
    grid = u.grid
    values = _SQRT_2_OVER_PI*grid.dr/grid.xi*_sine_sum(grid.r*u.values)
    return SpectralField(grid, values)


def inverse_transform(v):
    _check_kind(v, SpectralField)
    grid = v.grid
    values = _SQRT_2_OVER_PI*grid.dxi/grid.r*_sine_sum(grid.xi*v.values)
    return RadialField(grid, values)


def quadrature_3d(u):
    """4*pi*dr*sum u(r_j) r_j^2, the trapezoid rule with zeros at both ends"""
    _check_kind(u, RadialField)
    return np.sum(u.grid.weights*u.values)


def spectral_quadrature_3d(v):
    _check_kind(v, SpectralField)
    return np.sum(v.grid.spectral_weights*v.values)


def inner(u, v):
    """<u, v> = int conj(u) v dx"""
    _check_kind(u, RadialField)
    return quadrature_3d(u.conj()*v)


def norm(u):
    if isinstance(u, SpectralField):
        return np.sqrt(spectral_quadrature_3d(u.abs2()))
    return np.sqrt(quadrature_3d(u.abs2()))


def origin_value(u):
    """Even extrapolation to r = 0 through the first three nodes (quadratic
    in r^2)"""
    values = u.values if isinstance(u, _Field) else np.asarray(u)
    return 1.5*values[0] - 0.6*values[1] + 0.1*values[2]


def radial_derivative(u, method="spectral"):
    """du/dr on the nodes.

    "spectral" differentiates the sine series of g = r*u exactly and uses
    u' = (g' - u)/r. "centered" uses second order differences with one sided
    second order stencils at both ends.
    """
    _check_kind(u, RadialField)
    grid = u.grid
    if method == "spectral":
        xi_v = grid.xi*forward_transform(u).values
        g_prime = _SQRT_2_OVER_PI*grid.dxi*_cosine_sum(grid.xi*xi_v)
        values = (g_prime - u.values)/grid.r
    elif method == "centered":
        values = np.gradient(u.values, grid.dr, edge_order=2)
    else:
        raise ConfigError("method", "unknown differentiation method {!r}".format(method))
    return RadialField(grid, values)


def resample(u, points):
    """Monotone cubic interpolation through (0, u(0)), the nodes and
    (r_max, 0). Zero beyond r_max."""
    _check_kind(u, RadialField)
    if u.is_complex:
        return resample(u.real, points) + 1j*resample(u.imag, points)
    grid = u.grid
    points = np.asarray(points, dtype=float)
    x = np.concatenate(([0.0], grid.r, [grid.r_max]))
    y = np.concatenate(([origin_value(u)], u.values, [0.0]))
    out = PchipInterpolator(x, y, extrapolate=False)(np.abs(points))
    return np.where(np.abs(points) <= grid.r_max, out, 0.0)


def to_grid(u, grid):
    """The same function sampled on another grid"""
    if u.grid == grid:
        return u
    return RadialField(grid, resample(u, grid.r))


def write_field(field, filename):
    """CSV `r,value` / `xi,value`, or `r,re,im` / `xi,re,im` if complex"""
    axis = field._axis
    if field.is_complex:
        write_columns(filename, (axis, "re", "im"),
                      (field.nodes, field.values.real, field.values.imag))
    else:
        write_columns(filename, (axis, "value"), (field.nodes, field.values))


def read_field(filename, grid=None):
    header, columns = read_columns(filename)
    axis = header[0]
    kind = {"r": RadialField, "xi": SpectralField}.get(axis)
    if kind is None:
        raise GridMismatchError("{}: unknown first column {!r}".format(filename, axis))
    nodes = columns[0]
    n = len(nodes)
    if grid is None:
        r_max = (n+1)*nodes[-1]/n if axis == "r" else np.pi*n/nodes[-1]
        grid = RadialGrid(n, r_max)
    if n != grid.n or not np.allclose(nodes, getattr(grid, axis), rtol=1e-12, atol=0):
        raise GridMismatchError("{}: nodes do not match {!r}".format(filename, grid))
    if header[1:] == ["re", "im"]:
        values = columns[1] + 1j*columns[2]
    else:
        values = columns[1]
    return kind(grid, values)
