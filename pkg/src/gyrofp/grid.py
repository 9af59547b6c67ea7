"""Cell-centred Larmor-radius grid with quadrature for the ``2 pi u du`` measure."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = ["WeightKind", "VelocityGrid", "integrate_u", "end_corrections", "CORRECTION_WIDTH"]

CORRECTION_WIDTH = 6


class WeightKind(enum.Enum):
    """Weight functions used by the weighted ``u`` norms."""

    U = "u"  # 2 pi u
    M = "m"  # 2 pi u (1 + u^2)
    M_TILDE = "m_tilde"  # 1 + u^2
    INVERSE_U = "inverse_u"  # 2 pi u (1 + u^2) / u

    def factor(self, u: np.ndarray) -> np.ndarray:
        """Ratio of this weight to ``2 pi u`` at the nodes ``u``."""
        if self is WeightKind.U:
            return np.ones_like(u)
        if self is WeightKind.M:
            return 1.0 + u * u
        if self is WeightKind.M_TILDE:
            return (1.0 + u * u) / (2.0 * np.pi * u)
        return (1.0 + u * u) / u


def _bernoulli(n: int) -> Fraction:
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


@lru_cache(maxsize=None)
def end_corrections(width: int = CORRECTION_WIDTH) -> tuple[float, ...]:
    """Weight corrections for the first ``width`` nodes of a midpoint rule.

    With these corrections applied at both ends, the midpoint rule on
    ``width`` or more cells integrates polynomials of degree ``width - 1``
    exactly. The left-end error of the plain midpoint rule for ``t^p`` on unit
    cells is ``B_{p+1}(1/2) / (p + 1)``; the corrections reproduce it.
    """
    t = np.arange(width) + 0.5
    vander = np.vander(t, width, increasing=True).T
    rhs = np.array(
        [float((Fraction(2) ** (-p) - 1) * _bernoulli(p + 1)) / (p + 1) for p in range(width)]
    )
    return tuple(np.linalg.solve(vander, rhs))


@dataclass(frozen=True, eq=False)
class VelocityGrid:
    """Uniform cell-centred nodes ``u_j = (j - 1/2) du`` on ``(0, u_max]``.

    ``weights`` realise ``int_0^u_max g(u) 2 pi u du`` by ``sum_j w_j g(u_j)``.
    They are midpoint weights ``2 pi u_j du`` with end corrections of width
    :data:`CORRECTION_WIDTH`, so the rule is exact for ``2 pi u g(u)`` with
    ``g`` a polynomial of degree ``degree`` (and sixth order for smooth ``g``).
    """

    n: int
    u_max: float
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    du: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < CORRECTION_WIDTH:
            raise ValueError(f"need at least {CORRECTION_WIDTH} nodes, got {self.n}")
        if not (np.isfinite(self.u_max) and self.u_max > 0):
            raise ValueError("u_max must be positive and finite")
        du = self.u_max / self.n
        u = (np.arange(self.n) + 0.5) * du
        scale = np.ones(self.n)
        corr = np.array(end_corrections(CORRECTION_WIDTH))
        scale[:CORRECTION_WIDTH] += corr
        scale[-CORRECTION_WIDTH:] += corr[::-1]
        w = 2.0 * np.pi * u * du * scale
        u.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "du", du)
        object.__setattr__(self, "nodes", u)
        object.__setattr__(self, "weights", w)

    @property
    def degree(self) -> int:
        """Polynomial degree of ``g`` integrated exactly against ``2 pi u du``."""
        return CORRECTION_WIDTH - 2

    @property
    def volumes(self) -> np.ndarray:
        """Weights for the plain ``u du`` measure, ``w_j / 2 pi``."""
        return self.weights / (2.0 * np.pi)

    def weights_for(self, kind: WeightKind) -> np.ndarray:
        return self.weights * kind.factor(self.nodes)

    def key(self) -> tuple[int, float]:
        return (self.n, float(self.u_max))

    def __eq__(self, other):
        return isinstance(other, VelocityGrid) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @classmethod
    def for_temperature(cls, n: int, T: float, cutoff: float = 6.0) -> "VelocityGrid":
        """Grid with ``u_max = cutoff * sqrt(T)``."""
        return cls(n, cutoff * float(np.sqrt(T)))


def integrate_u(samples, grid: VelocityGrid, weight: WeightKind = WeightKind.U, axis: int = -1):
    """Weighted quadrature ``sum_j w_j g(u_j)`` along ``axis``.

    Raises ``ValueError`` when the sample count along ``axis`` is not ``grid.n``.
    """
    arr = np.asarray(samples)
    if arr.ndim == 0 or arr.shape[axis] != grid.n:
        raise ValueError(f"expected {grid.n} samples along axis {axis}, got shape {arr.shape}")
    w = grid.weights_for(weight)
    return np.tensordot(np.moveaxis(arr, axis, -1), w, axes=([-1], [0]))
