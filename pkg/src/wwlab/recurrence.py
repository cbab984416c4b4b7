"""Multiple recurrence averages, their uniform versions, and companions.

The uniform average of order k maximizes

    || (1/N) sum_{n=1..N} prod_{j=1..k} g_j o T^{j n} . f o T^{(k+1) n} ||_2

over companion observables with sup-norm at most 1.  The maximization is a
coordinate ascent: the objective is a positive semidefinite quadratic in any
one g_j, so aligning one value's phase at a time (closed form) never
decreases it.  Tiny instances can be solved exactly over the real-sign
class by enumeration.

Also here: fixed-function recurrence norms, polynomial-phase suprema of
recurrence products, return-times weighted averages driven by a second
system, and the pointwise dominating quantity built from scaled cube
products that controls two-system averages.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._util import check_budget, fsum, fsum_complex
from .supbrackets import Bracket, _grid_sup_rows, sup_polyphase
from .systems import FiniteSystem, Observable

_BRUTE_CASE_CAP = 1 << 20


@dataclass(frozen=True)
class ExponentVector:
    """Distinct nonzero integer exponents a_1 .. a_J."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(int(a) for a in self.entries)
        if not entries:
            raise ValueError("exponent vector must be nonempty")
        if any(a == 0 for a in entries):
            raise ValueError("exponents must be nonzero")
        if len(set(entries)) != len(entries):
            raise ValueError("exponents must be distinct")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def first_abs(self) -> int:
        return abs(self.entries[0])


@dataclass
class MrecBracket:
    """Result of a uniform recurrence maximization.

    ``lower`` is always attained by the reported witnesses; ``upper`` is the
    triangle-inequality cap ||f||_2 unless brute-force enumeration closed
    the gap (then the two endpoints agree on the searched class).
    """

    lower: float
    upper: float
    method: str
    witnesses: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _step_tables(system: FiniteSystem, steps, N: int) -> list:
    """Index tables t[n-1] = T^{a n} for n = 1..N, one per step a."""
    tables = []
    for a in steps:
        base = system.power_indices(int(a))
        tbl = np.empty((N, system.size), dtype=np.int64)
        tbl[0] = base
        for n in range(1, N):
            tbl[n] = base[tbl[n - 1]]
        tables.append(tbl)
    return tables


def multiple_recurrence_average(
    system: FiniteSystem,
    functions,
    exponents: ExponentVector,
    N: int,
    norm_p: int = 2,
):
    """|| (1/N) sum_n prod_j f_j o T^{a_j n} ||_p for given observables."""
    if len(functions) != len(exponents):
        raise ValueError("need one observable per exponent")
    if N < 1:
        raise ValueError("N must be >= 1")
    for f in functions:
        if len(f) != system.size:
            raise ValueError("observable size does not match system")
    check_budget(float(N) * system.size * len(functions), what="multiple_recurrence_average")
    tables = _step_tables(system, exponents.entries, N)
    acc = np.zeros(system.size, dtype=np.complex128)
    for n in range(N):
        term = np.ones(system.size, dtype=np.complex128)
        for f, tbl in zip(functions, tables):
            term = term * f.values[tbl[n]]
        acc += term
    avg = acc / N
    w = system.weights
    if norm_p == 2:
        return math.sqrt(fsum((w * np.abs(avg) ** 2).tolist()))
    if norm_p == 1:
        return fsum((w * np.abs(avg)).tolist())
    raise ValueError("norm_p must be 1 or 2")


# -- uniform version ---------------------------------------------------------


class _AscentState:
    """Coordinate ascent on one companion function with the rest frozen."""

    def __init__(self, system, f_vals, g_list, tables, f_table, N):
        self.system = system
        self.f_vals = f_vals
        self.g_list = g_list
        self.tables = tables
        self.f_table = f_table
        self.N = N

    def kernel_for(self, l: int) -> np.ndarray:
        """Dense matrix K with A(x) = sum_y K[x, y] g_l(y)."""
        M = self.system.size
        K = np.zeros((M, M), dtype=np.complex128)
        rows = np.arange(M)
        for n in range(self.N):
            b = self.f_vals[self.f_table[n]].copy()
            for j, (g, tbl) in enumerate(zip(self.g_list, self.tables)):
                if j != l:
                    b *= g[tbl[n]]
            K[rows, self.tables[l][n]] += b / self.N
        return K

    def objective(self) -> float:
        A = self.average()
        return fsum((self.system.weights * np.abs(A) ** 2).tolist())

    def average(self) -> np.ndarray:
        acc = np.zeros(self.system.size, dtype=np.complex128)
        for n in range(self.N):
            term = self.f_vals[self.f_table[n]].copy()
            for g, tbl in zip(self.g_list, self.tables):
                term *= g[tbl[n]]
            acc += term
        return acc / self.N

    def sweep(self, l: int, K: np.ndarray, A: np.ndarray, real_signs: bool) -> np.ndarray:
        w = self.system.weights
        g = self.g_list[l]
        col_sq = (w[:, None] * np.abs(K) ** 2).sum(axis=0)
        for y in range(self.system.size):
            col = K[:, y]
            c_full = np.vdot(col, w * A)  # sum_x w conj(K) A
            c = c_full - col_sq[y] * g[y]
            if real_signs:
                new = 1.0 if c.real > 0 else (-1.0 if c.real < 0 else g[y])
            else:
                mag = abs(c)
                new = c / mag if mag > 1e-300 else g[y]
            delta = new - g[y]
            if delta != 0:
                A = A + col * delta
                g[y] = new
        return A


def uniform_mrec_bracket(
    system: FiniteSystem,
    f: Observable,
    k: int,
    N: int,
    restarts: int = 2,
    seed: int = 0,
    tol: float = 1e-9,
    max_cycles: int = 60,
    real_signs: bool = False,
    brute_force: bool = False,
    budget=None,
) -> MrecBracket:
    """Maximize the order-k recurrence norm over companions bounded by 1.

    Alternating maximization from seeded starts (plus the all-ones start);
    the per-sweep objective trace is monotone by construction.  With
    ``brute_force`` the real-sign class {-1, +1}^points per companion is
    enumerated exactly instead (k <= 2 and small systems only).
    """
    if k < 1:
        raise ValueError("order k must be >= 1")
    if N < 1:
        raise ValueError("N must be >= 1")
    if len(f) != system.size:
        raise ValueError("observable size does not match system")
    M = system.size
    w = system.weights
    cap = math.sqrt(fsum((w * np.abs(f.values) ** 2).tolist()))
    tables = _step_tables(system, range(1, k + 1), N)
    f_table = _step_tables(system, [k + 1], N)[0]

    if brute_force:
        if k > 2:
            raise ValueError("brute force supports k <= 2")
        cases = (1 << M) ** k
        if cases > _BRUTE_CASE_CAP:
            raise ValueError(f"brute force would enumerate {cases} cases (cap {_BRUTE_CASE_CAP})")
        check_budget(float(cases) * N * M, budget, "uniform_mrec_bracket brute force")
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=M)))
        best = -1.0
        best_g = None
        combos = itertools.product(range(signs.shape[0]), repeat=k)
        for combo in combos:
            gs = [signs[i] for i in combo]
            acc = np.zeros(M, dtype=np.complex128)
            for n in range(N):
                term = f.values[f_table[n]].copy()
                for g, tbl in zip(gs, tables):
                    term = term * g[tbl[n]]
                acc += term
            val = fsum((w * np.abs(acc / N) ** 2).tolist())
            if val > best:
                best = val
                best_g = [g.copy() for g in gs]
        val = math.sqrt(best)
        return MrecBracket(val, val, "brute", [np.asarray(g) for g in best_g])

    est = (restarts + 1) * max_cycles * k * (float(N) * M + M * M)
    check_budget(est, budget, "uniform_mrec_bracket")
    rng = np.random.default_rng(int(seed))
    best_obj = -1.0
    best_g = None
    best_trace: list = []
    for attempt in range(restarts + 1):
        if attempt == 0:
            g_list = [np.ones(M, dtype=np.complex128) for _ in range(k)]
        elif real_signs:
            g_list = [np.where(rng.random(M) < 0.5, -1.0, 1.0).astype(np.complex128) for _ in range(k)]
        else:
            g_list = [np.exp(2j * np.pi * rng.random(M)) for _ in range(k)]
        state = _AscentState(system, f.values, g_list, tables, f_table, N)
        obj = state.objective()
        trace = [obj]
        for _ in range(max_cycles):
            for l in range(k):
                K = state.kernel_for(l)
                A = state.average()
                A = state.sweep(l, K, A, real_signs)
            obj_new = state.objective()
            if obj_new < obj - 1e-12 * max(1.0, obj):
                raise AssertionError("coordinate ascent decreased the objective")
            trace.append(obj_new)
            if obj_new - obj <= tol * max(1.0, obj):
                obj = obj_new
                break
            obj = obj_new
        if obj > best_obj:
            best_obj = obj
            best_g = [g.copy() for g in g_list]
            best_trace = trace
    lower = math.sqrt(max(best_obj, 0.0))
    upper = max(cap, lower)
    return MrecBracket(lower, upper, "alternating", best_g, best_trace)


# -- polynomial-phase supremum over recurrence products ----------------------


def polyphase_mrec_sup(
    system: FiniteSystem,
    functions,
    exponents: ExponentVector,
    phase_degree: int,
    N: int,
    oversample: int = 16,
    budget=None,
) -> Bracket:
    """Bracket for || sup_{t_1..t_k} |(1/N) sum_n e^{2 pi i p_t(n)}
    prod_j f_j o T^{a_j n}| ||_2 with p_t(n) = t_1 n + ... + t_k n^k."""
    if len(functions) != len(exponents):
        raise ValueError("need one observable per exponent")
    if phase_degree < 1:
        raise ValueError("phase degree must be >= 1")
    if N < 1:
        raise ValueError("N must be >= 1")
    M = system.size
    check_budget(float(M) * oversample ** phase_degree * float(N) ** (phase_degree * (phase_degree + 1) // 2 + 1),
                 budget, "polyphase_mrec_sup")
    tables = _step_tables(system, exponents.entries, N)
    seq = np.ones((N, M), dtype=np.complex128)
    for f, tbl in zip(functions, tables):
        for n in range(N):
            seq[n] *= f.values[tbl[n]]
    seq = seq.T  # (points, N)
    if phase_degree == 1:
        lo, up, _ = _grid_sup_rows(seq, oversample)
    else:
        lo = np.empty(M)
        up = np.empty(M)
        for x in range(M):
            b = sup_polyphase(seq[x], phase_degree, oversample, budget)
            lo[x] = b.lower
            up[x] = b.upper
    w = system.weights
    lo_n = math.sqrt(fsum((w * lo**2).tolist()))
    up_n = math.sqrt(fsum((w * up**2).tolist()))
    return Bracket(lo_n, max(up_n, lo_n), ())


# -- return times ------------------------------------------------------------


def _poly_eval_int(coeffs, n: int) -> int:
    """Integer polynomial c_0 + c_1 n + c_2 n^2 + ... evaluated exactly."""
    acc = 0
    for c in reversed(list(coeffs)):
        acc = acc * n + int(c)
    return acc


def companion_weights(systemY: FiniteSystem, g_list, steps, N: int) -> np.ndarray:
    """W[n-1, y] = prod_k g_k(S^{b_k n} y) for n = 1..N."""
    if len(g_list) != len(steps):
        raise ValueError("need one companion observable per step")
    W = np.ones((N, systemY.size), dtype=np.complex128)
    tables = _step_tables(systemY, steps, N)
    for g, tbl in zip(g_list, tables):
        if len(g) != systemY.size:
            raise ValueError("companion size does not match system")
        for n in range(N):
            W[n] *= g.values[tbl[n]]
    return W


def return_times_average(
    systemY: FiniteSystem,
    g: Observable,
    poly_coeffs,
    systemX: FiniteSystem,
    functions,
    exponents: ExponentVector,
    x_point: int,
    N: int,
) -> Observable:
    """Observable y -> (1/N) sum_n g(S^{P(n)} y) prod_j f_j(T^{a_j n} x).

    P is an integer-coefficient polynomial (constant first).  Orbit
    positions are reduced modulo cycle lengths, so large P(n) values cost
    nothing.
    """
    if len(g) != systemY.size:
        raise ValueError("weight observable size does not match its system")
    if not 0 <= x_point < systemX.size:
        raise ValueError("base point out of range")
    if len(functions) != len(exponents):
        raise ValueError("need one observable per exponent")
    if N < 1:
        raise ValueError("N must be >= 1")
    check_budget(float(N) * (systemY.size + len(functions)), what="return_times_average")
    # scalar factors along the X orbit
    systemX._ensure_cycles()
    cyc = systemX._cycles[int(systemX._cycle_id[x_point])]
    pos = int(systemX._cycle_pos[x_point])
    scalars = np.ones(N, dtype=np.complex128)
    for f, a in zip(functions, exponents.entries):
        if len(f) != systemX.size:
            raise ValueError("observable size does not match base system")
        idx = (pos + (np.arange(1, N + 1, dtype=object) * a))
        idx = np.array([int(i % cyc.size) for i in idx])
        scalars *= f.values[cyc[idx]]
    acc = np.zeros(systemY.size, dtype=np.complex128)
    for n in range(1, N + 1):
        perm = systemY.power_indices(_poly_eval_int(poly_coeffs, n))
        acc += g.values[perm] * scalars[n - 1]
    return Observable(acc / N)


# -- pointwise dominating quantity -------------------------------------------


@dataclass(frozen=True)
class PointwiseDominator:
    """Per-point bracket values of the dominating quantity."""

    lower: Observable
    upper: Observable
    shift_range: int
    additive_floor: float


def intermediate_F(
    system: FiniteSystem,
    functions,
    exponents: ExponentVector,
    K_order: int,
    N: int,
    oversample: int = 16,
    threads: int = 1,
    budget=None,
) -> PointwiseDominator:
    """Pointwise dominator built from cube products at scale a_j.

    Per point x the value is

        floor(sqrt(N))^{-1/2^{K-1}} +
        ( mean over shift tuples h in [floor(sqrt(N)/|a_1|)]^{K-1} of
          sup_t |(1/N) sum_n e^{2 pi i n t} prod_j G_{j,h}(T^{a_j n} x)|
        )^{1/2^{K-1}},

    where G_{j,h} = prod_{eta} C^{|eta|} f_j o T^{a_j (h . eta)}.  Lower and
    upper endpoints come from the certified supremum brackets.
    """
    if K_order < 1:
        raise ValueError("K must be >= 1")
    if len(functions) != len(exponents):
        raise ValueError("need one observable per exponent")
    if N < 1:
        raise ValueError("N must be >= 1")
    M = system.size
    root = max(1, math.isqrt(N))
    H = max(1, math.isqrt(N) // exponents.first_abs)
    tuples = list(itertools.product(range(1, H + 1), repeat=K_order - 1))
    check_budget(len(tuples) * float(M) * N * oversample * max(1.0, math.log2(oversample * N)),
                 budget, "intermediate_F")
    tables = _step_tables(system, exponents.entries, N)
    lo_acc = np.zeros(M)
    up_acc = np.zeros(M)
    for h in tuples:
        seq = np.ones((N, M), dtype=np.complex128)
        for (f, a, tbl) in zip(functions, exponents.entries, tables):
            cube = np.ones(M, dtype=np.complex128)
            for bits in itertools.product((0, 1), repeat=K_order - 1):
                shift = a * sum(b * x for b, x in zip(bits, h))
                gv = f.values[system.power_indices(shift)]
                if sum(bits) % 2 == 1:
                    gv = np.conjugate(gv)
                cube = cube * gv
            for n in range(N):
                seq[n] *= cube[tbl[n]]
        lo, up, _ = _grid_sup_rows(seq.T, oversample)
        lo_acc += lo
        up_acc += up
    lo_acc /= len(tuples)
    up_acc /= len(tuples)
    floor_term = float(root) ** (-1.0 / 2 ** (K_order - 1))
    expo = 1.0 / 2 ** (K_order - 1)
    return PointwiseDominator(
        Observable(floor_term + lo_acc**expo),
        Observable(floor_term + up_acc**expo),
        H,
        floor_term,
    )
