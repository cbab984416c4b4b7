"""Certified brackets for suprema of modulated averages over phases.

All three operations share one scheme: evaluate the target on a uniform
phase grid anchored at t = 0 (the grid maximum is a rigorous lower bound,
since the supremum is over a superset), then convert the grid maximum into
a rigorous upper bound.

Upper bound certificates
------------------------
For an exponential sum g with integer frequencies, write n_c for the
centered degree (half the frequency spread, since a unimodular modulation
recenters the frequencies without changing |g|).  If psi is a real
trigonometric polynomial of degree n with sup-norm M attained at t*, then
psi(t* + d) >= M cos(2 pi n d) for |d| <= 1/(2n); applying this to
Re(alpha g) with alpha aligning the phase at the argmax gives

    sup |g|  <=  (grid max of |g|) / cos(pi n_c / K)

for a K-point grid with K > 2 n_c.  Two cheaper bounds are intersected
with it: a first-order step bound (grid max plus derivative bound times
half spacing) and the triangle-inequality cap (mean absolute coefficient),
so flat inputs get zero-width brackets.  At the default 16x oversampling
the secant factor is below 1.005, i.e. bracket widths under half a percent.

Multi-phase suprema iterate the same argument one coordinate at a time, so
the certified factor is a product of per-coordinate secants (degree k <= 2;
higher degrees return flagged lower bounds only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import check_budget, fsum_complex

_MAX_CERTIFIED_DEGREE = 2
_MIN_OVERSAMPLE = 4


@dataclass(frozen=True)
class Bracket:
    """Two-sided enclosure of a supremum, with the grid argmax as a hint."""

    lower: float
    upper: float
    argmax_hint: tuple
    certified: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("bracket endpoints must be finite")
        if self.upper < self.lower - 1e-15 * max(1.0, abs(self.lower)):
            raise ValueError(f"inverted bracket [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def rel_width(self) -> float:
        return self.width / max(abs(self.lower), 1e-300)

    def map_monotone(self, fn) -> "Bracket":
        """Apply a nondecreasing function to both endpoints."""
        return Bracket(float(fn(self.lower)), float(fn(self.upper)), self.argmax_hint, self.certified)

    @staticmethod
    def exact(value: float, hint: tuple = ()) -> "Bracket":
        return Bracket(float(value), float(value), hint)


@dataclass(frozen=True)
class PhaseSpec:
    """Polynomial phase t_1 n + t_2 n^2 + ... + t_k n^k.

    ``fixed`` pins the coefficient vector for single-point evaluation;
    leaving it None means the supremum over all coefficients is requested.
    """

    degree: int
    fixed: tuple | None = None

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("phase degree must be >= 0")
        if self.fixed is not None:
            fixed = tuple(float(t) for t in self.fixed)
            if len(fixed) != self.degree:
                raise ValueError("fixed coefficients must match the phase degree")
            object.__setattr__(self, "fixed", fixed)


def _validate_oversample(oversample: int) -> int:
    oversample = int(oversample)
    if oversample < _MIN_OVERSAMPLE:
        raise ValueError(f"oversample must be >= {_MIN_OVERSAMPLE} (got {oversample})")
    return oversample


def _secant(degree: int, grid: int) -> float:
    if degree == 0:
        return 1.0
    x = math.pi * degree / grid
    if x >= math.pi / 2:
        raise ValueError("grid too coarse for the secant certificate")
    return 1.0 / math.cos(x)


def modulated_mean(u, coefficients) -> complex:
    """(1/N) sum_{n=1..N} u_n exp(2 pi i (t_1 n + ... + t_k n^k)), exactly."""
    u = np.asarray(u, dtype=np.complex128)
    N = u.size
    if N == 0:
        raise ValueError("empty sequence")
    n = np.arange(1, N + 1, dtype=float)
    phase = np.zeros(N)
    for j, t in enumerate(coefficients, start=1):
        phase = phase + float(t) * n**j
    terms = u * np.exp(2j * np.pi * phase)
    return fsum_complex(terms.tolist()) / N


# -- grid kernels ------------------------------------------------------------


def _grid_sup_rows(U: np.ndarray, oversample: int):
    """Shared kernel: per-row bracket data for sup_t |(1/N) sum u_n e^{2 pi i n t}|.

    U has shape (rows, N) with the sequence index n = 1..N along axis 1.
    Returns (lower, upper, argmax_t) arrays of shape (rows,).
    """
    rows, N = U.shape
    K = oversample * N
    padded = np.zeros((rows, K), dtype=np.complex128)
    padded[:, 1 : N + 1] = U
    values = np.abs(np.fft.ifft(padded, axis=1)) * (K / N)
    lower = values.max(axis=1)
    arg = values.argmax(axis=1) / K
    absU = np.abs(U)
    sec = _secant(N // 2, K)
    deriv = (2.0 * math.pi / N) * (absU * np.arange(1, N + 1)).sum(axis=1)
    cap = absU.sum(axis=1) / N
    upper = np.minimum(np.minimum(lower * sec, lower + deriv / (2 * K)), cap)
    upper = np.maximum(upper, lower)  # guard against rounding inversions
    return lower, upper, arg


def sup_modulated_average(u, oversample: int = 16, budget: float | None = None) -> Bracket:
    """Bracket for sup over t of |(1/N) sum_{n=1..N} u_n e^{2 pi i n t}|."""
    oversample = _validate_oversample(oversample)
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("sequence must be a nonempty 1-d array")
    K = oversample * u.size
    check_budget(K * max(1.0, math.log2(K)), budget, "sup_modulated_average")
    lower, upper, arg = _grid_sup_rows(u[None, :], oversample)
    return Bracket(float(lower[0]), float(upper[0]), (float(arg[0]),))


def sup_norm_trig(coefficients, oversample: int = 16, budget: float | None = None) -> Bracket:
    """Bracket for the supremum of a real trigonometric polynomial.

    ``coefficients`` is an odd-length array c_{-D}..c_D (frequency d at index
    d + D) and must be Hermitian, so the polynomial q(t) = sum c_d e^{2 pi i d t}
    is real-valued.  The upper bound certifies sup q through the sup-norm:
    sup q <= ||q||_inf <= (grid max of |q|) * sec(pi D / K).
    """
    oversample = _validate_oversample(oversample)
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.ndim != 1 or c.size % 2 != 1:
        raise ValueError("coefficients must be a 1-d array of odd length")
    D = c.size // 2
    herm = c[::-1].conj()
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.max(np.abs(c - herm)) > 1e-10 * scale:
        raise ValueError("coefficients are not Hermitian; polynomial would not be real")
    K = oversample * c.size
    check_budget(K * max(1.0, math.log2(K)), budget, "sup_norm_trig")
    # q(t_j) = Re(b_0 + sum_{d>=1} b_d e^{2 pi i d j / K}) with b_d = 2 c_d
    b = np.zeros(K, dtype=np.complex128)
    b[0] = c[D].real
    b[1 : D + 1] = 2.0 * c[D + 1 :]
    vals = (np.fft.ifft(b) * K).real
    j = int(np.argmax(vals))
    lower = float(vals[j])
    grid_abs = float(np.max(np.abs(vals)))
    d_idx = np.abs(np.arange(-D, D + 1))
    deriv = 2.0 * math.pi * float((d_idx * np.abs(c)).sum())
    cap = float(np.abs(c).sum())
    upper = min(grid_abs * _secant(D, K), lower + deriv / (2 * K), cap)
    upper = max(upper, lower)
    return Bracket(lower, upper, (j / K,))


def sup_polyphase(u, degree: int, oversample: int = 16, budget: float | None = None) -> Bracket:
    """Bracket for sup over (t_1..t_k) of |(1/N) sum u_n e^{2 pi i p(n)}|
    with p(n) = t_1 n + ... + t_k n^k.

    Degrees 0..2 are certified; higher degrees return a flagged lower bound
    whose upper endpoint is the triangle-inequality cap.
    """
    oversample = _validate_oversample(oversample)
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("sequence must be a nonempty 1-d array")
    N = u.size
    if degree < 0:
        raise ValueError("degree must be >= 0")
    cap = float(np.abs(u).sum() / N)
    if degree == 0:
        val = abs(fsum_complex((u / N).tolist()))
        return Bracket(val, val, ())
    if degree == 1:
        lower, upper, arg = _grid_sup_rows(u[None, :], oversample)
        return Bracket(float(lower[0]), float(upper[0]), (float(arg[0]),))
    grids = [oversample * N**j for j in range(1, degree + 1)]
    total = 1.0
    for g in grids:
        total *= g
    check_budget(total * max(1.0, math.log2(grids[0])), budget, "sup_polyphase")
    if degree == 2:
        return _sup_polyphase_2(u, oversample, cap)
    return _sup_polyphase_coarse(u, degree, oversample, cap, budget)


def _sup_polyphase_2(u: np.ndarray, oversample: int, cap: float) -> Bracket:
    N = u.size
    K1, K2 = oversample * N, oversample * N * N
    n = np.arange(1, N + 1)
    best = -1.0
    best_j1 = best_j2 = 0
    chunk = max(1, 4_000_000 // K1)
    for start in range(0, K2, chunk):
        j2 = np.arange(start, min(start + chunk, K2))
        # rows: u_n twisted by the quadratic phase at each t_2 grid value
        twisted = u[None, :] * np.exp(2j * np.pi * np.outer(j2 / K2, n * n % K2))
        padded = np.zeros((j2.size, K1), dtype=np.complex128)
        padded[:, 1 : N + 1] = twisted
        vals = np.abs(np.fft.ifft(padded, axis=1)) * (K1 / N)
        flat = int(np.argmax(vals))
        r, c = divmod(flat, K1)
        if vals[r, c] > best:
            best = float(vals[r, c])
            best_j1, best_j2 = c, int(j2[r])
    n1c, n2c = N // 2, (N * N) // 2
    sec = _secant(n1c, K1) * _secant(n2c, K2)
    absu = np.abs(u)
    deriv1 = (2.0 * math.pi / N) * float((absu * n).sum())
    deriv2 = (2.0 * math.pi / N) * float((absu * n * n).sum())
    upper = min(best * sec, best + deriv1 / (2 * K1) + deriv2 / (2 * K2), cap)
    upper = max(upper, best)
    return Bracket(best, upper, (best_j1 / K1, best_j2 / K2))


def _sup_polyphase_coarse(u: np.ndarray, degree: int, oversample: int, cap: float, budget) -> Bracket:
    """Lower-bound-only search for degree >= 3 (not certified)."""
    N = u.size
    grids = [oversample * N**j for j in range(1, degree + 1)]
    total = 1
    for g in grids:
        total *= g
    check_budget(float(total) * N, budget, "sup_polyphase coarse search")
    n = np.arange(1, N + 1, dtype=float)
    best = -1.0
    best_t: tuple = ()
    # iterate the outer grids in plain nested order; innermost axis via FFT
    outer_axes = [np.arange(g) / g for g in grids[1:]]
    mesh = np.meshgrid(*outer_axes, indexing="ij") if outer_axes else []
    combos = np.stack([m.ravel() for m in mesh], axis=1) if outer_axes else np.zeros((1, 0))
    for row in combos:
        phase = np.zeros(N)
        for j, t in enumerate(row, start=2):
            phase = phase + t * n**j
        twisted = u * np.exp(2j * np.pi * phase)
        lower, _, arg = _grid_sup_rows(twisted[None, :], oversample)
        if float(lower[0]) > best:
            best = float(lower[0])
            best_t = (float(arg[0]), *map(float, row))
    return Bracket(best, max(cap, best), best_t, certified=False)
