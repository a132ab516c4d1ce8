"""Closed-form two-level PT-symmetric model used throughout the test-suite and CLI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Brachistochrone:
    """H = [[r e^{i theta}, s], [s, r e^{-i theta}]] with real r, s, theta."""

    r: float
    s: float
    theta: float

    def hamiltonian(self) -> np.ndarray:
        r, s, th = self.r, self.s, self.theta
        return np.array([[r * np.exp(1j * th), s], [s, r * np.exp(-1j * th)]], dtype=complex)

    @property
    def discriminant(self) -> float:
        return self.s ** 2 - (self.r * np.sin(self.theta)) ** 2

    def eigenvalues(self) -> np.ndarray:
        """r cos(theta) -/+ sqrt(s^2 - r^2 sin^2 theta), lower root first."""
        root = np.sqrt(complex(self.discriminant))
        c = self.r * np.cos(self.theta)
        return np.array([c - root, c + root])

    @property
    def alpha(self) -> float:
        """Mixing angle with sin(alpha) = (r/s) sin(theta); unbroken phase only."""
        return float(np.arcsin(self.r * np.sin(self.theta) / self.s))

    @property
    def frequency(self) -> float:
        """Level splitting 2 sqrt(s^2 - r^2 sin^2 theta)."""
        return 2.0 * np.sqrt(self.discriminant)
