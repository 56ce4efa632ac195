"""Resistance and intrinsic metrics on finite Dirichlet spaces.

Effective resistance is computed from the measure-free form matrix
B = diag(deg) - W (killing must be absent): R(x, y) is the energy of the
potential difference e_x - e_y against the pseudoinverse of B, which
agrees with the variational description

    R(x, y) = sup { |f(x) - f(y)|^2 : E(f) <= 1 }.

A pseudo-metric d is *intrinsic* for a form when the per-vertex jump
energy of d is dominated by the measure:

    sum_y b(x, y) d(x, y)^2 <= m(x)   for every vertex x.

This per-vertex inequality is the implemented definition of membership in
the intrinsic family; it is sufficient for the distance functions
d(., A) ^ T because |d_A(x) - d_A(y)| <= d(x, y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .core import GraphForm, generator
from .errors import (
    DimensionMismatch,
    HasKilling,
    InvalidMetric,
    NotConnected,
    NotRecurrent,
    SpaceMismatch,
)
from .orderiso import OrderIso, operator_constant, require_intertwining
from .report import VerificationReport
from .spectral import is_irreducible, is_recurrent
from .tolerances import DEFAULT_TOL, Tolerance

# relative eigenvalue cutoff for the pseudoinverse of the form matrix
_PINV_CUTOFF = 1e-12


@dataclass(eq=False)
class PseudoMetric:
    """Symmetric nonnegative vertex-pair matrix with the triangle inequality."""

    vertices: tuple[str, ...]
    d: np.ndarray

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        d = np.asarray(self.d, dtype=float)
        n = len(self.vertices)
        if d.shape != (n, n):
            raise DimensionMismatch(f"metric shape {d.shape} does not match {n} vertices")
        if not np.all(np.isfinite(d)) or np.any(d < 0.0):
            raise InvalidMetric("entries must be finite and >= 0")
        scale = max(1.0, float(np.max(d)))
        bound = DEFAULT_TOL.bound(scale)
        if np.max(np.abs(d - d.T)) > bound or np.max(np.abs(np.diag(d))) > bound:
            raise InvalidMetric("metric must be symmetric with zero diagonal")
        # triangle inequality: d[i,k] <= d[i,j] + d[j,k]
        if np.max(d[:, None, :] - (d[:, :, None] + d[None, :, :])) > bound:
            raise InvalidMetric("triangle inequality violated")
        d.flags.writeable = False
        self.d = d

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PseudoMetric)
            and self.vertices == other.vertices
            and np.array_equal(self.d, other.d)
        )

    def scaled(self, factor: float) -> "PseudoMetric":
        return PseudoMetric(self.vertices, factor * self.d)


class IntrinsicCheck(NamedTuple):
    ok: bool
    slack: np.ndarray


def _resistance_pinv(form: GraphForm) -> np.ndarray:
    """Pseudoinverse of the measure-free form matrix, cached per form."""
    cached = getattr(form, "_resistance_pinv", None)
    if cached is not None:
        return cached
    if not is_irreducible(form):
        raise NotConnected("effective resistance needs a connected conductance graph")
    if np.any(form.c != 0.0):
        raise HasKilling("effective resistance is undefined in the presence of killing")
    b = np.diag(form.degrees) - form.weight_matrix
    w, v = np.linalg.eigh(b)
    cutoff = _PINV_CUTOFF * float(np.max(np.abs(w), initial=0.0))
    inv = np.where(np.abs(w) > cutoff, 1.0 / np.where(w == 0.0, 1.0, w), 0.0)
    pinv = (v * inv) @ v.T
    form._resistance_pinv = pinv
    return pinv


def effective_resistance(form: GraphForm, x: str, y: str) -> float:
    """Effective resistance between two vertices."""
    pinv = _resistance_pinv(form)
    i, j = form.space.index(x), form.space.index(y)
    return float(pinv[i, i] + pinv[j, j] - 2.0 * pinv[i, j])


def resistance_matrix(form: GraphForm) -> PseudoMetric:
    """The full resistance metric of a connected killing-free form."""
    pinv = _resistance_pinv(form)
    diag = np.diag(pinv)
    r = diag[:, None] + diag[None, :] - 2.0 * pinv
    r = np.maximum(0.5 * (r + r.T), 0.0)
    np.fill_diagonal(r, 0.0)
    return PseudoMetric(form.space.vertices, r)


def resistance_maximizer(form: GraphForm, x: str, y: str) -> np.ndarray:
    """The energy-one potential attaining the resistance supremum.

    The optimizer is the pseudoinverse potential of the dipole e_x - e_y,
    normalized to unit energy; |f(x) - f(y)|^2 then equals R(x, y).
    """
    pinv = _resistance_pinv(form)
    i, j = form.space.index(x), form.space.index(y)
    dipole = np.zeros(len(form.space))
    dipole[i], dipole[j] = 1.0, -1.0
    f = pinv @ dipole
    energy = float(f @ (np.diag(form.degrees) - form.weight_matrix) @ f)
    return f / math.sqrt(energy)


def verify_resistance_isometry(
    iso: OrderIso, form1: GraphForm, form2: GraphForm, tol: Tolerance = DEFAULT_TOL
) -> VerificationReport:
    """Certify that an intertwiner is a scaled isometry for the resistances.

    For recurrent irreducible intertwined forms the scaling h is a constant
    alpha and the resistance metrics satisfy

        alpha^2 R1(tau(y), tau(z)) = beta R2(y, z)

    for all target vertices y, z, with beta the operator constant.  When
    the total masses agree, alpha equals sqrt(beta) and tau is a plain
    isometry; that special case is checked separately when it applies.
    """
    if not (is_recurrent(form1) and is_recurrent(form2)):
        raise NotRecurrent("resistance comparison requires recurrent forms")
    require_intertwining(iso, generator(form1), generator(form2), tol)
    beta = operator_constant(iso)
    alpha = float(np.mean(iso.h_values))
    r1 = resistance_matrix(form1).d
    r2 = resistance_matrix(form2).d
    idx = iso.tau_indices
    lhs = alpha**2 * r1[np.ix_(idx, idx)]
    rhs = beta * r2
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))

    report = VerificationReport()
    report.add(
        "resistance_isometry", float(np.max(np.abs(lhs - rhs))), tol.bound(scale),
        detail=f"alpha={alpha!r} beta={beta!r}",
    )
    mass1 = form1.space.total_mass
    mass2 = form2.space.total_mass
    if abs(mass1 - mass2) <= tol.bound(max(mass1, mass2)):
        plain = float(np.max(np.abs(r1[np.ix_(idx, idx)] - r2)))
        residual = max(plain, abs(alpha - math.sqrt(beta)))
        report.add(
            "equal_mass_isometry", residual,
            tol.bound(max(1.0, float(np.max(r1)), float(np.max(r2)))),
        )
    else:
        report.skip("equal_mass_isometry", "total masses differ")
    return report


def is_intrinsic(
    form: GraphForm, metric: PseudoMetric, tol: Tolerance = DEFAULT_TOL
) -> IntrinsicCheck:
    """Check the per-vertex bound sum_y b(x,y) d(x,y)^2 <= m(x).

    Returns the verdict together with the slack vector
    m(x) - sum_y b(x,y) d(x,y)^2 for diagnostics.
    """
    if metric.vertices != form.space.vertices:
        raise DimensionMismatch("metric does not live on the form's vertex set")
    slack = form.space.m - np.sum(form.weight_matrix * metric.d**2, axis=1)
    bounds = tol.rel * form.space.m + tol.abs
    return IntrinsicCheck(bool(np.all(slack >= -bounds)), slack)


def canonical_intrinsic_metric(form: GraphForm) -> PseudoMetric:
    """A canonical member of the intrinsic family: the path metric with edge
    lengths sigma(x,y) = min(sqrt(m(x)/deg(x)), sqrt(m(y)/deg(y))).

    Intrinsic by construction: sum_y b(x,y) sigma(x,y)^2 <= m(x) because
    sigma(x,y)^2 <= m(x)/deg(x), and shortest paths only shrink distances.
    """
    if not is_irreducible(form):
        raise NotConnected("path metric needs a connected conductance graph")
    n = len(form.space)
    if n == 1:
        return PseudoMetric(form.space.vertices, np.zeros((1, 1)))
    deg = form.degrees
    weight = np.sqrt(form.space.m / np.where(deg > 0.0, deg, 1.0))
    lengths = np.minimum(weight[:, None], weight[None, :])
    graph = np.where(form.weight_matrix > 0.0, lengths, 0.0)
    dist = shortest_path(graph, method="D", directed=False, unweighted=False)
    return PseudoMetric(form.space.vertices, dist)


def boundary_rescaled(
    form: GraphForm, metric: PseudoMetric
) -> PseudoMetric | None:
    """Scale a metric up until some vertex slack is exactly zero.

    Returns None for metrics with zero jump energy everywhere (nothing to
    saturate).
    """
    energy = np.sum(form.weight_matrix * metric.d**2, axis=1)
    positive = energy > 0.0
    if not np.any(positive):
        return None
    factor = float(np.min(np.sqrt(form.space.m[positive] / energy[positive])))
    return metric.scaled(factor)


def default_metric_samples(form: GraphForm) -> list[tuple[str, PseudoMetric]]:
    """Sample metrics probing the intrinsic family from inside and outside.

    The zero metric, the canonical path metric, its rescaling to the
    boundary of the family (some slack exactly zero) and an inflation past
    the boundary (not intrinsic).
    """
    n = len(form.space)
    samples = [("zero", PseudoMetric(form.space.vertices, np.zeros((n, n))))]
    canonical = canonical_intrinsic_metric(form)
    samples.append(("canonical", canonical))
    boundary = boundary_rescaled(form, canonical)
    if boundary is not None:
        samples.append(("boundary", boundary))
        samples.append(("inflated", boundary.scaled(1.5)))
    return samples


def pushforward_metric(metric: PseudoMetric, iso: OrderIso) -> PseudoMetric:
    """Transport a metric on the source space to the target along tau."""
    if metric.vertices != iso.source.vertices:
        raise SpaceMismatch("metric does not live on the iso's source space")
    idx = iso.tau_indices
    return PseudoMetric(iso.target.vertices, metric.d[np.ix_(idx, idx)])


def verify_intrinsic_bijection(
    iso: OrderIso,
    form1: GraphForm,
    form2: GraphForm,
    samples: Sequence[tuple[str, PseudoMetric]] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> VerificationReport:
    """Certify that pulling metrics along tau preserves the intrinsic family.

    For each sample metric d on the source space, membership of d in the
    intrinsic family of the first form must coincide with membership of
    the transported metric d(tau(.), tau(.)) in the family of the second.
    Mismatches are reported with both slack vectors.
    """
    if not (is_recurrent(form1) and is_recurrent(form2)):
        raise NotRecurrent("the intrinsic-family comparison requires recurrent forms")
    require_intertwining(iso, generator(form1), generator(form2), tol)
    if samples is None:
        samples = default_metric_samples(form1)

    report = VerificationReport()
    for name, metric in samples:
        check1 = is_intrinsic(form1, metric, tol)
        check2 = is_intrinsic(form2, pushforward_metric(metric, iso), tol)
        agree = check1.ok == check2.ok
        detail = f"source={'in' if check1.ok else 'out'} target={'in' if check2.ok else 'out'}"
        if not agree:
            detail += (
                f"; source slack={np.array2string(check1.slack, precision=6)}"
                f" target slack={np.array2string(check2.slack, precision=6)}"
            )
        report.add(
            f"intrinsic_pushforward_{name}",
            0.0 if agree else 1.0,
            0.5,
            detail=detail,
        )
    return report
