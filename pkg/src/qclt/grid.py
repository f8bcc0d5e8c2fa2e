"""Square midpoint-rule grid on phase space."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["PhaseGrid", "ExtentError", "BOUNDARY_TOL"]

BOUNDARY_TOL = 1e-8


class ExtentError(ValueError):
    """The grid does not cover the effective support of a function."""

    def __init__(self, message: str, suggested_extent: float | None = None):
        super().__init__(message)
        self.suggested_extent = suggested_extent


@dataclass(frozen=True)
class PhaseGrid:
    """Nodes ``-R + (i + 1/2) h`` on each axis, ``h = 2R/K``.

    Arrays sampled on the grid are indexed ``[i_re, i_im]``.
    """

    half_extent: float = 12.0
    points_per_axis: int = 384

    def __post_init__(self):
        if not self.half_extent > 0:
            raise ValueError("half_extent must be positive")
        if self.points_per_axis < 16 or self.points_per_axis % 2:
            raise ValueError("points_per_axis must be an even integer >= 16")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / self.points_per_axis

    @property
    def weight(self) -> float:
        return self.spacing**2

    @property
    def acceptance_grade(self) -> bool:
        return self.spacing <= 0.25

    @cached_property
    def axis(self) -> np.ndarray:
        h = self.spacing
        return -self.half_extent + (np.arange(self.points_per_axis) + 0.5) * h

    @cached_property
    def z(self) -> np.ndarray:
        """Complex node array of shape ``(K, K)``."""
        re, im = np.meshgrid(self.axis, self.axis, indexing="ij")
        return re + 1j * im

    @cached_property
    def ring_mask(self) -> np.ndarray:
        K = self.points_per_axis
        mask = np.zeros((K, K), dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask

    def doubled(self) -> "PhaseGrid":
        return PhaseGrid(self.half_extent, 2 * self.points_per_axis)

    def check_boundary(self, values: np.ndarray, tol: float = BOUNDARY_TOL, what: str = "function") -> float:
        """Raise :class:`ExtentError` unless ``|values|`` on the outer ring is below ``tol``."""
        ring = float(np.max(np.abs(values[self.ring_mask])))
        if ring > tol:
            raise ExtentError(
                f"{what} is {ring:.2e} on the grid boundary (R={self.half_extent}); "
                f"increase the grid extent, e.g. to R={1.5 * self.half_extent:g}",
                suggested_extent=1.5 * self.half_extent,
            )
        return ring
