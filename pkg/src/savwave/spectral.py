"""Fourier machinery on a doubly periodic rectangle.

Fields are plain ``(nx, nx)`` float arrays indexed ``u[i, j] = u(x_i, y_j)``.
Spectra are ``(nx, nx)`` complex arrays in FFT ordering, normalised so that a
constant field ``c`` has ``S[0, 0] == c``.

Diagonal operators (fractional powers of ``-Δ`` and the stepping matrix) are
applied through ``rfft2``/``irfft2`` on the half spectrum; the public
``forward``/``inverse`` pair uses the full spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``nx`` points (and Fourier modes) per axis."""

    nx: int
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.nx, (int, np.integer)) or isinstance(self.nx, bool):
            raise ValueError(f"nx must be an integer, got {self.nx!r}")
        if self.nx < 2 or self.nx % 2:
            raise ValueError(f"nx must be an even integer >= 2, got {self.nx}")
        if not self.xmax > self.xmin:
            raise ValueError(f"degenerate x bounds ({self.xmin}, {self.xmax})")
        if not self.ymax > self.ymin:
            raise ValueError(f"degenerate y bounds ({self.ymin}, {self.ymax})")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.nx)

    @property
    def lx(self) -> float:
        return self.xmax - self.xmin

    @property
    def ly(self) -> float:
        return self.ymax - self.ymin

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.nx

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    @cached_property
    def modes(self) -> np.ndarray:
        """Signed integer mode indices in FFT order."""
        return np.fft.fftfreq(self.nx, d=1.0 / self.nx).round().astype(int)

    @cached_property
    def kx(self) -> np.ndarray:
        return 2.0 * np.pi * self.modes / self.lx

    @cached_property
    def ky(self) -> np.ndarray:
        return 2.0 * np.pi * self.modes / self.ly

    @cached_property
    def x(self) -> np.ndarray:
        return self.xmin + self.hx * np.arange(self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return self.ymin + self.hy * np.arange(self.nx)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    @cached_property
    def k2(self) -> np.ndarray:
        """``kx**2 + ky**2`` on the full spectrum."""
        return self.kx[:, None] ** 2 + self.ky[None, :] ** 2

    @cached_property
    def k2_half(self) -> np.ndarray:
        """``kx**2 + ky**2`` on the ``rfft2`` half spectrum."""
        return self.k2[:, : self.nx // 2 + 1]

    # -- transforms ---------------------------------------------------------

    def check(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != self.shape:
            raise ValueError(f"array shape {f.shape} does not match grid {self.shape}")
        return f

    def forward(self, f: np.ndarray) -> np.ndarray:
        return np.fft.fft2(self.check(f)) / self.nx**2

    def inverse(self, spec: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(self.check(spec) * self.nx**2).real

    def symbol(self, beta: float, half: bool = True) -> np.ndarray:
        """Multiplier ``(kx**2 + ky**2)**beta``; identity when ``beta == 0``.

        Half-spectrum symbols are cached and returned read-only.
        """
        if beta < 0:
            raise ValueError(f"beta must be non-negative, got {beta}")
        if not half:
            return np.ones(self.shape) if beta == 0 else self.k2**beta
        key = ("symbol", float(beta))
        sym = self._cache.get(key)
        if sym is None:
            sym = np.ones_like(self.k2_half) if beta == 0 else self.k2_half**beta
            sym.setflags(write=False)
            self._cache[key] = sym
        return sym

    def apply_multiplier(self, f: np.ndarray, mult: np.ndarray) -> np.ndarray:
        """Multiply the half spectrum of ``f`` by a real, even ``mult``."""
        fh = np.fft.rfft2(self.check(f))
        return np.fft.irfft2(fh * mult, s=self.shape)

    def divide_multiplier(self, f: np.ndarray, mult: np.ndarray) -> np.ndarray:
        fh = np.fft.rfft2(self.check(f))
        return np.fft.irfft2(fh / mult, s=self.shape)

    def frac_laplacian(self, f: np.ndarray, beta: float) -> np.ndarray:
        """``(-Δ)**beta f``; the zero mode is annihilated for ``beta > 0``."""
        return self.apply_multiplier(f, self.symbol(beta))

    # -- inner products and norms -------------------------------------------

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """Physical L2 pairing by the (spectrally exact) rectangle rule."""
        return float(self.hx * self.hy * np.sum(self.check(f) * self.check(g)))

    def l2_norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.inner(f, f)))

    def seminorm(self, f: np.ndarray, r: float) -> float:
        """``sqrt(|Ω| Σ |û|² (kx²+ky²)^r)``; equals the L2 norm at ``r = 0``."""
        fh = self.forward(f)
        total = np.sum(np.abs(fh) ** 2 * self.symbol(r, half=False))
        return float(np.sqrt(self.area * total))

    def restrict(self, f_fine: np.ndarray) -> np.ndarray:
        """Spectral truncation of a field given on a finer grid with the same bounds.

        Keeps modes ``-nx/2 .. nx/2-1`` per axis, matching the span of the
        trial space on this grid.
        """
        f_fine = np.asarray(f_fine)
        nf = f_fine.shape[0]
        if f_fine.shape != (nf, nf) or nf < self.nx or nf % 2:
            raise ValueError(f"cannot restrict shape {f_fine.shape} to grid {self.shape}")
        if nf == self.nx:
            return f_fine.copy()
        spec = np.fft.fft2(f_fine) / nf**2
        idx = self.modes % nf
        coarse = spec[np.ix_(idx, idx)]
        return np.fft.ifft2(coarse * self.nx**2).real


def make_grid(nx: int, bounds: tuple[float, float, float, float]) -> Grid:
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    return Grid(nx, xmin, xmax, ymin, ymax)


def linf_norm(f: np.ndarray) -> float:
    return float(np.max(np.abs(f)))


def apply_A_inverse(grid: Grid, f: np.ndarray, tau: float, problem) -> np.ndarray:
    """Invert ``(2 + τγ₂) I + (τ²κ/2 + τγ₁)(-Δ)^{α/2}`` mode by mode."""
    return grid.divide_multiplier(f, stepping_symbol(grid, tau, problem))


def stepping_symbol(grid: Grid, tau: float, problem) -> np.ndarray:
    lap = grid.symbol(problem.alpha / 2)
    return (2.0 + tau * problem.gamma2) + (0.5 * tau**2 * problem.kappa + tau * problem.gamma1) * lap
