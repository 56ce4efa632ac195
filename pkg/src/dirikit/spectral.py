"""Semigroups and structural predicates of finite Dirichlet forms.

The heat semigroup e^{-tL} is computed through the eigendecomposition of
the m-symmetrized matrix A = M^{1/2} L M^{-1/2} (symmetric and stable to
diagonalize) and conjugated back; L itself is not symmetric when the
measure is non-uniform.  The decomposition is cached per generator behind
a lock; results are bit-identical with and without the cache.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import Generator, GraphForm, VertexFunction, evaluate, generator
from .errors import (
    NegativeInput,
    NegativeTime,
    NotExcessive,
    NotIrreducible,
)
from .tolerances import DEFAULT_TOL, Tolerance


@dataclass(eq=False)
class SpectralData:
    """Eigenvalues (ascending) and an m-orthonormal eigenvector basis."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns; <u_i, u_j>_m = delta_ij


_cache_lock = threading.Lock()


def spectral_data(gen: Generator) -> SpectralData:
    """Diagonalize a generator; cached per Generator instance."""
    cached = getattr(gen, "_spectral", None)
    if cached is not None:
        return cached
    with _cache_lock:
        cached = getattr(gen, "_spectral", None)
        if cached is None:
            sqrt_m = np.sqrt(gen.space.m)
            sym = gen.L * (sqrt_m[:, None] / sqrt_m[None, :])
            sym = 0.5 * (sym + sym.T)
            w, v = np.linalg.eigh(sym)
            cached = SpectralData(w, v / sqrt_m[:, None])
            gen._spectral = cached
    return cached


def semigroup(gen: Generator, t: float) -> np.ndarray:
    """The heat operator e^{-tL} at time t >= 0.

    The result is positivity preserving and sub-Markov: entries >= 0 and
    row sums <= 1, up to floating-point error.
    """
    if t < 0:
        raise NegativeTime(f"semigroup time must be >= 0, got {t}")
    data = spectral_data(gen)
    sqrt_m = np.sqrt(gen.space.m)
    decay = np.exp(-t * data.eigenvalues)
    return (data.eigenvectors * decay) @ (data.eigenvectors.T * gen.space.m[None, :])


def is_irreducible(form: GraphForm) -> bool:
    """Whether the positive-conductance graph is connected."""
    return _offdiagonal_connected(form.weight_matrix)


def _offdiagonal_connected(coupling: np.ndarray) -> bool:
    n = coupling.shape[0]
    if n == 0:
        return False
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(coupling[i] != 0.0)[0]:
            if j != i and not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def is_recurrent(form: GraphForm) -> bool:
    """Whether the form annihilates constants, i.e. has no killing."""
    return bool(np.all(form.c == 0.0))


def is_excessive(gen: Generator, h: VertexFunction, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether h >= 0 satisfies e^{-tL} h <= h for all t >= 0.

    Implemented through the generator criterion L h >= 0, which is
    equivalent: d/dt e^{-tL} h = -e^{-tL} (L h) <= 0 entrywise whenever
    L h >= 0 (the semigroup is positivity preserving), and e^{-0L} h = h;
    conversely (h - e^{-tL} h)/t -> L h as t -> 0.
    """
    hv = gen.space.vector(h)
    if np.any(hv < 0.0):
        raise NegativeInput("excessive candidates must be nonnegative")
    residual = gen.L @ hv
    scale = max(1.0, float(np.max(np.abs(gen.L))) * max(1.0, float(np.max(hv, initial=0.0))))
    return bool(np.min(residual) >= -tol.bound(scale))


def find_nonconstant_excessive(
    gen: Generator,
    tol: Tolerance = DEFAULT_TOL,
    separation: float = 1e-3,
) -> np.ndarray | None:
    """Search the excessive cone for a nonconstant strictly positive element.

    For each ordered vertex pair (x0, x1) a linear feasibility problem is
    solved: L h >= 0, h >= 1, h(x0) = 1, h(x1) >= 1 + separation, picking
    the feasible solution minimizing sum(h) so the reported witness is
    deterministic.  Returns None when every pair is infeasible, which for
    irreducible forms happens exactly when the form is recurrent and all
    excessive functions are constant.
    """
    if not _offdiagonal_connected(gen.L - np.diag(np.diag(gen.L))):
        raise NotIrreducible("nonconstant-excessive search requires an irreducible form")
    n = len(gen.space)
    cost = np.ones(n)
    a_ub = -gen.L  # L h >= 0
    b_ub = np.zeros(n)
    for i0, i1 in itertools.permutations(range(n), 2):
        a_eq = np.zeros((1, n))
        a_eq[0, i0] = 1.0
        bounds = [(1.0, None)] * n
        bounds[i1] = (1.0 + separation, None)
        result = linprog(
            cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
            bounds=bounds, method="highs",
        )
        if result.status == 0:
            return np.asarray(result.x, dtype=float)
    return None


def check_truncation(
    form: GraphForm,
    f: VertexFunction,
    h: VertexFunction,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[float, float, bool]:
    """Energy bounds for truncations by an excessive function.

    Returns (Q(f ^ h), Q((f - h)_+), ok) where ok holds when both
    Q(f ^ h) <= Q(f) and Q((f - h)_+) <= 4 Q(f) within tolerance.
    """
    gen = generator(form)
    if not is_excessive(gen, h, tol):
        raise NotExcessive("truncation bounds require an excessive h")
    fv = form.space.vector(f)
    hv = form.space.vector(h)
    qf = evaluate(form, fv)
    q_min = evaluate(form, np.minimum(fv, hv))
    q_plus = evaluate(form, np.maximum(fv - hv, 0.0))
    bound = tol.bound(max(1.0, abs(qf)))
    ok = q_min <= qf + bound and q_plus <= 4.0 * qf + bound
    return q_min, q_plus, bool(ok)


def commutant_is_trivial(gen: Generator, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether only scalar diagonal matrices commute with the semigroup.

    Solves [diag(phi), L] = 0, whose (x, y) entry is (phi(x) - phi(y))
    L[x,y], and checks that the solution space is one-dimensional.  Agrees
    with irreducibility: the constraint graph is the coupling graph of L.
    """
    n = len(gen.space)
    rows = []
    for i, j in itertools.combinations(range(n), 2):
        coeff = max(abs(gen.L[i, j]), abs(gen.L[j, i]))
        if coeff != 0.0:
            row = np.zeros(n)
            row[i] = coeff
            row[j] = -coeff
            rows.append(row)
    if not rows:
        return n == 1
    system = np.array(rows)
    rank = int(np.linalg.matrix_rank(system))
    return (n - rank) == 1
