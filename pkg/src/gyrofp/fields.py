"""Truncated Fourier fields on the torus ``[0, 2 pi)^2``.

Coefficients are stored on the full square ``|k_1|, |k_2| <= K`` with index
``[k_1 + K, k_2 + K]`` so that ``field(x) = sum_k c_k exp(i k.x)``. Physical
samples live on an ``n x n`` grid with ``n >= 3K + 1`` (2/3-rule dealiasing).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .grid import VelocityGrid, integrate_u

__all__ = [
    "TORUS_AREA",
    "physical_size",
    "wavenumbers",
    "SpectralField2D",
    "GyroDistribution",
    "to_physical",
    "from_physical",
    "hermitian_part",
]

TORUS_AREA = 4.0 * np.pi ** 2


@lru_cache(maxsize=None)
def physical_size(K: int) -> int:
    """Smallest FFT-friendly even grid size with no aliasing into ``|k| <= K``."""
    n = sfft.next_fast_len(3 * K + 1, real=True)
    if n % 2:
        n = sfft.next_fast_len(n + 1, real=True)
    return n


@lru_cache(maxsize=None)
def wavenumbers(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Broadcastable ``(k1, k2)`` integer arrays of shape ``(2K+1, 1)``, ``(1, 2K+1)``."""
    k = np.arange(-K, K + 1)
    k1, k2 = k[:, None].astype(float), k[None, :].astype(float)
    k1.setflags(write=False)
    k2.setflags(write=False)
    return k1, k2


def to_physical(coeffs: np.ndarray, K: int, n: int | None = None) -> np.ndarray:
    """Samples on the ``n x n`` grid of a truncated real field (leading two axes modal).

    Only the ``k_2 >= 0`` half of ``coeffs`` is read; the rest is implied by
    Hermitian symmetry.
    """
    n = physical_size(K) if n is None else n
    half = np.zeros((n, n // 2 + 1) + coeffs.shape[2:], dtype=complex)
    half[np.arange(-K, K + 1) % n, : K + 1] = coeffs[:, K:]
    return sfft.irfft2(half, s=(n, n), axes=(0, 1), norm="forward")


def from_physical(values: np.ndarray, K: int) -> np.ndarray:
    """Truncated Hermitian coefficients ``|k_i| <= K`` of real grid samples."""
    n = values.shape[0]
    half = sfft.rfft2(values, axes=(0, 1), norm="forward")
    coeffs = np.empty((2 * K + 1, 2 * K + 1) + values.shape[2:], dtype=complex)
    coeffs[:, K:] = half[np.arange(-K, K + 1) % n, : K + 1]
    coeffs[:, K] = 0.5 * (coeffs[:, K] + np.conj(coeffs[::-1, K]))
    coeffs[:, :K] = np.conj(coeffs[::-1, :K:-1])
    return coeffs


def hermitian_part(coeffs: np.ndarray) -> np.ndarray:
    """Project onto coefficients of a real field, ``c(-k) = conj(c(k))``."""
    return 0.5 * (coeffs + np.conj(coeffs[::-1, ::-1]))


@dataclass(frozen=True, eq=False)
class SpectralField2D:
    """Real scalar field on the torus in truncated Fourier form."""

    coeffs: np.ndarray
    K: int
    zero_mean: bool = False

    def __post_init__(self):
        shape = (2 * self.K + 1, 2 * self.K + 1)
        if self.coeffs.shape != shape:
            raise ValueError(f"coefficients must have shape {shape}, got {self.coeffs.shape}")
        if self.zero_mean and self.coeffs[self.K, self.K] != 0:
            c = self.coeffs.copy()
            c[self.K, self.K] = 0.0
            object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, K: int, zero_mean: bool = False) -> "SpectralField2D":
        return cls(np.zeros((2 * K + 1, 2 * K + 1), dtype=complex), K, zero_mean)

    @classmethod
    def from_function(cls, func, K: int, zero_mean: bool = False) -> "SpectralField2D":
        """Truncate ``func(x1, x2)`` sampled on the dealiased grid."""
        n = physical_size(K)
        x = 2.0 * np.pi * np.arange(n) / n
        values = func(x[:, None], x[None, :]) * np.ones((n, n))
        return cls(from_physical(values, K), K, zero_mean)

    @classmethod
    def from_modes(cls, K: int, modes: dict, zero_mean: bool = False) -> "SpectralField2D":
        """Build from ``{(k1, k2): coefficient}``; conjugate partners are filled in."""
        c = np.zeros((2 * K + 1, 2 * K + 1), dtype=complex)
        for (a, b), val in modes.items():
            c[a + K, b + K] += val
            if (a, b) != (0, 0):
                c[-a + K, -b + K] += np.conj(val)
            else:
                c[K, K] = complex(val).real
        return cls(c, K, zero_mean)

    @property
    def mean(self) -> float:
        return float(self.coeffs[self.K, self.K].real)

    def values(self, n: int | None = None) -> np.ndarray:
        return to_physical(self.coeffs, self.K, n)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, np.conj(self.coeffs[::-1, ::-1]), atol=atol, rtol=0))

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField2D":
        return replace(self, coeffs=coeffs)

    def __add__(self, other: "SpectralField2D") -> "SpectralField2D":
        return SpectralField2D(self.coeffs + other.coeffs, self.K)

    def __sub__(self, other: "SpectralField2D") -> "SpectralField2D":
        return SpectralField2D(self.coeffs - other.coeffs, self.K)

    def __mul__(self, scalar: float) -> "SpectralField2D":
        return SpectralField2D(self.coeffs * scalar, self.K, self.zero_mean)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class GyroDistribution:
    """Distribution ``f(x, u)``: modal in ``x``, nodal in ``u``.

    ``modal`` has shape ``(2K+1, 2K+1, grid.n)``.
    """

    modal: np.ndarray
    grid: VelocityGrid
    K: int

    def __post_init__(self):
        shape = (2 * self.K + 1, 2 * self.K + 1, self.grid.n)
        if self.modal.shape != shape:
            raise ValueError(f"modal array must have shape {shape}, got {self.modal.shape}")

    @classmethod
    def from_function(cls, func, grid: VelocityGrid, K: int) -> "GyroDistribution":
        """Sample ``func(x1, x2, u)`` on the dealiased grid and truncate."""
        n = physical_size(K)
        x = 2.0 * np.pi * np.arange(n) / n
        vals = func(x[:, None, None], x[None, :, None], grid.nodes[None, None, :])
        vals = np.broadcast_to(vals, (n, n, grid.n))
        return cls(from_physical(np.ascontiguousarray(vals), K), grid, K)

    @classmethod
    def zeros(cls, grid: VelocityGrid, K: int) -> "GyroDistribution":
        return cls(np.zeros((2 * K + 1, 2 * K + 1, grid.n), dtype=complex), grid, K)

    def values(self, n: int | None = None) -> np.ndarray:
        """Physical samples, shape ``(n, n, grid.n)``."""
        return to_physical(self.modal, self.K, n)

    @property
    def mean_profile(self) -> np.ndarray:
        """``x``-average of ``f`` at each node."""
        return self.modal[self.K, self.K, :].real

    def mass(self) -> float:
        """``int f 2 pi u dx du``."""
        return float(TORUS_AREA * integrate_u(self.mean_profile, self.grid))

    def slice(self, j: int) -> SpectralField2D:
        return SpectralField2D(self.modal[:, :, j].copy(), self.K)

    def with_modal(self, modal: np.ndarray) -> "GyroDistribution":
        return replace(self, modal=modal)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.modal, np.conj(self.modal[::-1, ::-1, :]), atol=atol, rtol=0))

    def __add__(self, other: "GyroDistribution") -> "GyroDistribution":
        return self.with_modal(self.modal + other.modal)

    def __sub__(self, other: "GyroDistribution") -> "GyroDistribution":
        return self.with_modal(self.modal - other.modal)

    def __mul__(self, scalar: float) -> "GyroDistribution":
        return self.with_modal(self.modal * scalar)

    __rmul__ = __mul__
