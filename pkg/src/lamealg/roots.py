"""Simultaneous polynomial root finding (Aberth-Ehrlich) and root clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RootResult", "RootFindingError", "aberth_roots", "backward_error", "cluster_roots"]


class RootFindingError(ArithmeticError):
    """The iteration did not reach the requested backward error."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved residual {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class RootResult:
    roots: np.ndarray
    residuals: np.ndarray
    iterations: int

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0


def _horner(coeffs: np.ndarray, z: np.ndarray):
    """Values of p and p' at z; coeffs highest degree first."""
    p = np.full(z.shape, coeffs[0], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def backward_error(coeffs, z) -> np.ndarray:
    """Relative backward error |p(z)| / sum |a_k| |z|^k."""
    coeffs = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    p, _ = _horner(coeffs, z)
    scale = np.polyval(np.abs(coeffs), np.abs(z))
    return np.abs(p) / np.where(scale > 0, scale, 1.0)


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    a = np.abs(coeffs)
    # Fujiwara-type radius from the coefficient ratios, then geometric mean
    # of the outer and inner bounds so both tiny and huge roots are reachable
    ratios = [(a[k] / a[0]) ** (1.0 / k) for k in range(1, n + 1) if a[k] > 0]
    upper = 2.0 * max(ratios) if ratios else 1.0
    inv = [(a[n - k] / a[n]) ** (1.0 / k) for k in range(1, n + 1) if a[n - k] > 0] if a[n] > 0 else []
    lower = 1.0 / (2.0 * max(inv)) if inv else upper
    radius = np.sqrt(upper * lower)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return radius * np.exp(1j * angles)


def aberth_roots(coeffs, tol: float = 1e-12, maxiter: int = 2000) -> RootResult:
    """All roots of the polynomial with ``coeffs`` (highest degree first).

    Raises :class:`RootFindingError` when some root's backward error stays
    above ``tol``.
    """
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    if coeffs.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    n = coeffs.size - 1
    if n == 0:
        return RootResult(np.zeros(0, complex), np.zeros(0), 0)
    # zero roots are split off exactly
    zeros = 0
    while coeffs[-1] == 0:
        coeffs = coeffs[:-1]
        zeros += 1
    coeffs = coeffs / coeffs[0]
    m = coeffs.size - 1
    z = _initial_guesses(coeffs) if m else np.zeros(0, complex)
    active = np.ones(m, dtype=bool)
    it = 0
    for it in range(1, maxiter + 1):
        if not active.any():
            break
        p, dp = _horner(coeffs, z)
        idx = np.nonzero(active)[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p[idx] / dp[idx]
            diff = z[idx, None] - z[None, :]
            diff[np.arange(idx.size), idx] = np.inf
            s = (1.0 / diff).sum(axis=1)
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        step[bad] = 1e-3 * (1 + abs(z[idx][bad]))
        z[idx] -= step
        err = backward_error(coeffs, z[idx])
        small = np.abs(step) <= 4e-16 * np.maximum(1.0, np.abs(z[idx]))
        active[idx[(err < tol * 1e-2) | (small & (err < tol))]] = False
    res = backward_error(coeffs, z)
    if m and res.max() >= tol:
        raise RootFindingError("Aberth iteration did not converge", float(res.max()))
    roots = np.concatenate([z, np.zeros(zeros, complex)])
    residuals = np.concatenate([res, np.zeros(zeros)])
    return RootResult(roots, residuals, it)


def cluster_roots(roots, radius: float = 1e-6) -> list[tuple[complex, int]]:
    """Group roots closer than ``radius`` (single linkage); return (mean, count)."""
    roots = [complex(r) for r in roots]
    parent = list(range(len(roots)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= radius * max(1.0, abs(roots[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i, r in enumerate(roots):
        groups.setdefault(find(i), []).append(r)
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    out.sort(key=lambda rc: (np.angle(rc[0]), abs(rc[0])))
    return out
