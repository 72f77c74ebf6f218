"""Continuous wavelet transform on a uniform 1-D grid.

Scale components are ``W(a, b) = a^{-1/2} int conj(psi((x - b)/a)) f(x) dx``
with scales a > 0 only and the affine measure ``da db / a^2``.  Fourier
convention: ``psi_hat(w) = int psi(x) exp(-i w x) dx``.  With positive scales
only, the constant in both the norm identity and the reconstruction formula
is

    C_psi = 1/2 int_R |psi_hat(w)|^2 / |w| dw

(for real wavelets this is the one-sided integral over w > 0).

A sampled scale grid has a largest scale ``a_max``.  The part of the scale
integral above it, ``int_{a_max}^inf``, is evaluated exactly by one extra
low-pass row: filtering with ``phi_hat(w) = sqrt(Phi(a_max w))`` where
``Phi(t) = int_t^inf |psi_hat(s)|^2 / s ds``.  Without it a signal with a
nonzero mean loses energy proportional to (width / a_max).

All integrals are trapezoid sums; no FFT is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import GridMismatch, NonpositiveCpsi, NotAdmissible, ZeroSignal

ADMISSIBILITY_TOL = 1e-8


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return np.ones_like(x)
    d = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


@dataclass(frozen=True, eq=False)
class SampledSignal:
    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128).reshape(-1)
        if v.size < 2:
            raise GridMismatch("a signal needs at least 2 samples")
        if not (self.dx > 0 and math.isfinite(self.dx) and math.isfinite(self.x0)):
            raise GridMismatch(f"invalid grid x0={self.x0}, dx={self.dx}")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn: Callable, x0: float, dx: float, n: int) -> SampledSignal:
        x = x0 + dx * np.arange(n)
        return cls(x0, dx, fn(x))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def extent(self) -> float:
        return self.dx * (self.n - 1)

    def norm_sq(self) -> float:
        return float(np.sum(trapezoid_weights(self.x) * np.abs(self.values) ** 2))

    def __eq__(self, other):
        if not isinstance(other, SampledSignal):
            return NotImplemented
        return self.x0 == other.x0 and self.dx == other.dx and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class Wavelet:
    """Mother wavelet given analytically or by samples.

    ``support`` is the half-width outside which the function is treated as
    zero; ``freq_extent`` bounds the frequencies where psi_hat matters.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] | None = None
    support: float = 12.0
    freq_extent: float = 12.0
    samples: tuple[np.ndarray, np.ndarray] | None = None
    n_tab: int = 4001

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.func is not None:
            out = np.asarray(self.func(u))
            return np.where(np.abs(u) <= self.support, out, 0.0)
        xs, ys = self.samples
        re = np.interp(u, xs, ys.real, left=0.0, right=0.0)
        im = np.interp(u, xs, ys.imag, left=0.0, right=0.0)
        return re + 1j * im if np.any(ys.imag) else re

    @classmethod
    def tabulated(cls, name: str, x, y, freq_extent: float = 12.0) -> Wavelet:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=np.complex128)
        if x.ndim != 1 or x.shape != y.shape or np.any(np.diff(x) <= 0):
            raise GridMismatch("tabulated wavelet needs increasing x and matching samples")
        return cls(name, None, float(max(abs(x[0]), abs(x[-1]))), freq_extent, (x, y), x.size)

    def scaled(self, factor: complex) -> Wavelet:
        xs = self._grid()
        return Wavelet.tabulated(f"{factor}*{self.name}", xs, factor * self(xs), self.freq_extent)

    def _grid(self) -> np.ndarray:
        if self.samples is not None:
            return self.samples[0]
        return np.linspace(-self.support, self.support, self.n_tab)

    def fourier(self, omega) -> np.ndarray:
        """psi_hat on ``omega`` by trapezoid quadrature over the tabulation grid."""
        xs = self._grid()
        vals = self(xs) * trapezoid_weights(xs)
        omega = np.asarray(omega, dtype=float)
        return np.exp(-1j * np.multiply.outer(omega, xs)) @ vals

    def default_freq_grid(self, n: int = 4001) -> np.ndarray:
        return np.linspace(-self.freq_extent, self.freq_extent, n)

    @cached_property
    def _tail_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Phi(t) tabulated on t in [-freq_extent, freq_extent]."""
        half = np.linspace(0.0, self.freq_extent, 4001)
        out = []
        for sign in (1.0, -1.0):
            s = sign * half
            power = np.abs(self.fourier(s)) ** 2
            dens = np.divide(power, half, out=np.zeros_like(power), where=half > 0)
            seg = 0.5 * (dens[1:] + dens[:-1]) * np.diff(half)
            # integral from t outwards to the end of the table
            out.append(np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]]))
        return half, out[0], out[1]

    def tail_density(self, t) -> np.ndarray:
        """Phi(t): scale-integral weight of frequency w above scale a when t = a*w."""
        half, pos, neg = self._tail_table
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        return np.where(
            t >= 0,
            np.interp(at, half, pos, right=0.0),
            np.interp(at, half, neg, right=0.0),
        )


def mexican_hat() -> Wavelet:
    """(1 - x^2) exp(-x^2 / 2)."""
    return Wavelet("mexican_hat", lambda u: (1.0 - u * u) * np.exp(-0.5 * u * u))


def gaussian() -> Wavelet:
    """exp(-x^2 / 2); has nonzero mean, so it is not admissible."""
    return Wavelet("gaussian", lambda u: np.exp(-0.5 * u * u))


WAVELETS = {"mexican_hat": mexican_hat, "gaussian": gaussian}


def get_wavelet(name: str) -> Wavelet:
    try:
        return WAVELETS[name]()
    except KeyError:
        raise ValueError(f"unknown wavelet {name!r}; choose from {sorted(WAVELETS)}") from None


def admissibility_constant(w: Wavelet, freq_grid=None) -> float:
    """C_psi = 1/2 int |psi_hat|^2 / |w| dw over a grid spanning both signs."""
    omega = w.default_freq_grid() if freq_grid is None else np.asarray(freq_grid, dtype=float)
    if omega.ndim != 1 or omega.size < 3 or np.any(np.diff(omega) <= 0):
        raise GridMismatch("frequency grid must be increasing with at least 3 points")
    psihat = w.fourier(omega)
    scale = max(float(np.max(np.abs(psihat))), 1e-300)
    at_zero = abs(w.fourier([0.0])[0])
    if at_zero > ADMISSIBILITY_TOL * scale:
        raise NotAdmissible(f"|psi_hat(0)| = {at_zero:.3e}: wavelet has nonzero mean")
    aw = np.abs(omega)
    dens = np.divide(np.abs(psihat) ** 2, aw, out=np.zeros(omega.size), where=aw > 0)
    c = 0.5 * float(np.sum(trapezoid_weights(omega) * dens))
    if not (c > 0 and math.isfinite(c)):
        raise NotAdmissible(f"admissibility integral is {c}")
    return c


@dataclass(frozen=True, eq=False)
class ScaleField:
    """W(a_m, b_n) on a log-spaced scale grid, plus the low-pass row that
    carries the scale integral above the largest scale."""

    scales: np.ndarray
    translations: np.ndarray
    coeffs: np.ndarray
    x0: float
    dx: float
    n: int
    lowpass: np.ndarray | None = field(default=None)

    def __post_init__(self):
        a = _check_scales(self.scales)
        b = _check_translations(self.translations)
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.shape != (a.size, b.size):
            raise GridMismatch(f"coeffs shape {c.shape} != ({a.size}, {b.size})")
        arrays = [a, b, c]
        if self.lowpass is not None:
            low = np.array(self.lowpass, dtype=np.complex128).reshape(-1)
            if low.size != b.size:
                raise GridMismatch("low-pass row must match the translation grid")
            object.__setattr__(self, "lowpass", low)
            arrays.append(low)
        for arr in arrays:
            if not np.all(np.isfinite(arr)):
                raise ValueError("scale field entries must be finite")
            arr.flags.writeable = False
        if self.n < 2 or not self.dx > 0:
            raise GridMismatch("invalid signal grid metadata")
        object.__setattr__(self, "scales", a)
        object.__setattr__(self, "translations", b)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "n", int(self.n))

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def scale_weights(self) -> np.ndarray:
        """Trapezoid weights for da / a^2 on the scale grid (trapezoid in ln a)."""
        return trapezoid_weights(np.log(self.scales)) / self.scales

    def energy(self) -> float:
        """int |W|^2 da db / a^2, including the part above the largest scale."""
        wb = trapezoid_weights(self.translations)
        total = float(self.scale_weights() @ (np.abs(self.coeffs) ** 2 @ wb))
        if self.lowpass is not None:
            total += float(wb @ np.abs(self.lowpass) ** 2)
        return total

    def __eq__(self, other):
        if not isinstance(other, ScaleField):
            return NotImplemented
        same_low = (self.lowpass is None and other.lowpass is None) or (
            self.lowpass is not None and other.lowpass is not None and np.array_equal(self.lowpass, other.lowpass)
        )
        return (
            same_low
            and (self.x0, self.dx, self.n) == (other.x0, other.dx, other.n)
            and np.array_equal(self.scales, other.scales)
            and np.array_equal(self.translations, other.translations)
            and np.array_equal(self.coeffs, other.coeffs)
        )


def _check_scales(a) -> np.ndarray:
    a = np.array(a, dtype=float).reshape(-1)
    if a.size < 2 or np.any(a <= 0) or np.any(np.diff(a) <= 0) or not np.all(np.isfinite(a)):
        raise GridMismatch("scales must be positive, strictly increasing, at least 2")
    return a


def _check_translations(b) -> np.ndarray:
    b = np.array(b, dtype=float).reshape(-1)
    if b.size < 2 or np.any(np.diff(b) <= 0) or not np.all(np.isfinite(b)):
        raise GridMismatch("translations must be strictly increasing, at least 2")
    return b


def log_scales(f: SampledSignal, count: int, a_min: float | None = None, a_max: float | None = None) -> np.ndarray:
    """``count`` log-spaced scales from dx to one eighth of the signal extent."""
    lo = f.dx if a_min is None else a_min
    hi = (f.n * f.dx) / 8 if a_max is None else a_max
    return np.geomspace(lo, hi, count)


def _lowpass_freqs(w: Wavelet, a_max: float, span: float) -> np.ndarray:
    """Frequency grid for the low-pass row: covers phi_hat's support and is
    fine enough that the trapezoid sum does not alias over ``span``."""
    top = w.freq_extent / a_max
    step = math.pi / span
    n = max(257, 2 * int(math.ceil(top / step)) + 1)
    return np.linspace(-top, top, n)


def _span(x: np.ndarray, b: np.ndarray, w: Wavelet, a_max: float) -> float:
    lo = min(x[0], b[0]) - w.support * a_max
    hi = max(x[-1], b[-1]) + w.support * a_max
    return hi - lo


def forward_cwt(f: SampledSignal, w: Wavelet, scales, translations=None, lowpass: bool = True) -> ScaleField:
    """Scale components of ``f`` on ``scales`` x ``translations``.

    ``translations`` defaults to the signal grid.  With ``lowpass`` the
    result also carries the exact contribution of scales above the largest
    one; without it the scale integral is simply truncated.
    """
    a = _check_scales(scales)
    x = f.x
    b = x.copy() if translations is None else _check_translations(translations)
    weighted = f.values * trapezoid_weights(x)
    diff = x[None, :] - b[:, None]
    coeffs = np.empty((a.size, b.size), dtype=np.complex128)
    for m, scale in enumerate(a):
        kernel = np.conj(w(diff / scale)) / math.sqrt(scale)
        coeffs[m] = kernel @ weighted

    low = None
    if lowpass:
        omega = _lowpass_freqs(w, a[-1], _span(x, b, w, a[-1]))
        phihat = np.sqrt(w.tail_density(a[-1] * omega))
        fhat = np.exp(-1j * np.outer(omega, x)) @ weighted
        low = np.exp(1j * np.outer(b, omega)) @ (trapezoid_weights(omega) * np.conj(phihat) * fhat) / (2 * math.pi)
    return ScaleField(a, b, coeffs, f.x0, f.dx, f.n, low)


def inverse_cwt(field_: ScaleField, w: Wavelet, c_psi: float) -> SampledSignal:
    """Reconstruct on the original signal grid:
    f(x) = 1/C_psi int a^{-1/2} psi((x - b)/a) W(a, b) da db / a^2."""
    if not (c_psi > 0 and math.isfinite(c_psi)):
        raise NonpositiveCpsi(f"C_psi must be positive, got {c_psi}")
    x = field_.x
    b = field_.translations
    wb = trapezoid_weights(b)
    wa = field_.scale_weights()
    diff = x[:, None] - b[None, :]
    out = np.zeros(x.size, dtype=np.complex128)
    for m, scale in enumerate(field_.scales):
        kernel = w(diff / scale) / math.sqrt(scale)
        out += wa[m] * (kernel @ (wb * field_.coeffs[m]))
    if field_.lowpass is not None:
        a_max = field_.scales[-1]
        omega = _lowpass_freqs(w, a_max, _span(x, b, w, a_max))
        phihat = np.sqrt(w.tail_density(a_max * omega))
        lhat = np.exp(-1j * np.outer(omega, b)) @ (wb * field_.lowpass)
        out += np.exp(1j * np.outer(x, omega)) @ (trapezoid_weights(omega) * phihat * lhat) / (2 * math.pi)
    return SampledSignal(field_.x0, field_.dx, out / c_psi)


def parseval_ratio(f: SampledSignal, field_: ScaleField) -> float:
    """Scale-space energy divided by signal energy; tends to C_psi."""
    norm2 = f.norm_sq()
    if norm2 <= 0:
        raise ZeroSignal("signal has zero norm")
    if (f.x0, f.dx, f.n) != (field_.x0, field_.dx, field_.n):
        raise GridMismatch("scale field was not computed on this signal's grid")
    return field_.energy() / norm2


def relative_l2_error(f: SampledSignal, g: SampledSignal) -> float:
    if (f.x0, f.dx, f.n) != (g.x0, g.dx, g.n):
        raise GridMismatch("signals live on different grids")
    wx = trapezoid_weights(f.x)
    num = float(np.sum(wx * np.abs(f.values - g.values) ** 2))
    den = float(np.sum(wx * np.abs(f.values) ** 2))
    if den <= 0:
        raise ZeroSignal("reference signal has zero norm")
    return math.sqrt(num / den)
