"""Order isomorphisms between finite Dirichlet spaces.

An invertible positivity-preserving operator U between L^2(X1, m1) and
L^2(X2, m2) with positivity-preserving inverse factors as a weighted
composition operator

    (U f)(y) = h(y) f(tau(y))

for a vertex bijection tau: X2 -> X1 and a strictly positive scaling h on
X2.  This module applies such operators, forms their adjoints, measures
how far they are from intertwining two generators, and certifies the
rigidity identities an exact intertwiner must satisfy: U*U and UU* are a
single positive constant beta, h^2 m2 is the beta-scaled pullback of m1,
the forms differ by the factor beta on all basis pairs, h is excessive
for the target semigroup, and h is constant whenever both forms are
recurrent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .core import Generator, GraphForm, MeasureSpace, VertexFunction, generator
from .errors import (
    DimensionMismatch,
    NonPositive,
    NotBijective,
    NotExcessive,
    NotIntertwining,
    NotIrreducible,
    SpaceMismatch,
)
from .report import VerificationReport
from .spectral import is_excessive, is_irreducible, is_recurrent
from .tolerances import DEFAULT_TOL, Tolerance


@dataclass(eq=False)
class OrderIso:
    """A candidate intertwiner: bijection tau plus positive scaling h.

    ``tau`` maps target vertices to source vertices and ``h`` assigns each
    target vertex its scaling factor.  ``beta`` is the derived operator
    constant ||U||^2 once known.
    """

    source: MeasureSpace
    target: MeasureSpace
    tau: dict[str, str]
    h: dict[str, float]
    beta: float | None = None

    def __post_init__(self):
        targets = set(self.target.vertices)
        if set(self.tau) != targets:
            raise NotBijective("tau must be defined exactly on the target vertices")
        images = list(self.tau.values())
        if len(set(images)) != len(images) or set(images) != set(self.source.vertices):
            raise NotBijective("tau must map the target bijectively onto the source")
        if set(self.h) != targets:
            raise DimensionMismatch("h must be defined exactly on the target vertices")
        if any(value <= 0 or not np.isfinite(value) for value in self.h.values()):
            raise NonPositive("the scaling h must be strictly positive and finite")

    @cached_property
    def tau_indices(self) -> np.ndarray:
        """Source index of tau(y) for each target position y."""
        return np.array([self.source.index(self.tau[y]) for y in self.target.vertices])

    @cached_property
    def h_values(self) -> np.ndarray:
        return np.array([float(self.h[y]) for y in self.target.vertices])

    @cached_property
    def sigma_indices(self) -> np.ndarray:
        """Target index of tau^{-1}(x) for each source position x."""
        inverse = np.empty(len(self.source), dtype=int)
        inverse[self.tau_indices] = np.arange(len(self.target))
        return inverse

    def matrix(self) -> np.ndarray:
        """The operator as a matrix (one nonzero per row)."""
        u = np.zeros((len(self.target), len(self.source)))
        u[np.arange(len(self.target)), self.tau_indices] = self.h_values
        return u

    def inverse_matrix(self) -> np.ndarray:
        v = np.zeros((len(self.source), len(self.target)))
        v[self.tau_indices, np.arange(len(self.target))] = 1.0 / self.h_values
        return v

    @classmethod
    def identity(cls, space: MeasureSpace) -> "OrderIso":
        names = space.vertices
        return cls(space, space, {v: v for v in names}, {v: 1.0 for v in names}, beta=1.0)


def apply(iso: OrderIso, f: VertexFunction) -> np.ndarray:
    """Apply the weighted composition operator: (U f)(y) = h(y) f(tau(y))."""
    fv = iso.source.vector(f)
    return iso.h_values * fv[iso.tau_indices]


def adjoint(iso: OrderIso) -> np.ndarray:
    """Adjoint matrix: (U* g)(x) = m2(s(x)) h(s(x)) g(s(x)) / m1(x), s = tau^{-1}.

    Satisfies <U f, g>_{m2} = <f, U* g>_{m1}; it is itself positivity
    preserving.
    """
    sigma = iso.sigma_indices
    weights = iso.target.m[sigma] * iso.h_values[sigma] / iso.source.m
    a = np.zeros((len(iso.source), len(iso.target)))
    a[np.arange(len(iso.source)), sigma] = weights
    return a


def operator_constant(iso: OrderIso) -> float:
    """Mean diagonal of U*U, i.e. the average of h(y)^2 m2(y) / m1(tau(y))."""
    ratios = iso.h_values**2 * iso.target.m / iso.source.m[iso.tau_indices]
    return float(np.mean(ratios))


def intertwining_residual(iso: OrderIso, gen1: Generator, gen2: Generator) -> float:
    """Max-norm of U L1 - L2 U as a matrix; zero iff U intertwines the
    semigroups at all times."""
    if iso.source != gen1.space:
        raise SpaceMismatch("iso source does not match the first generator")
    if iso.target != gen2.space:
        raise SpaceMismatch("iso target does not match the second generator")
    u = iso.matrix()
    return float(np.max(np.abs(u @ gen1.L - gen2.L @ u)))


def _residual_scale(iso: OrderIso, gen1: Generator, gen2: Generator) -> float:
    h_max = float(np.max(iso.h_values))
    return max(1.0, h_max) * max(
        1.0, float(np.max(np.abs(gen1.L))), float(np.max(np.abs(gen2.L)))
    )


def require_intertwining(
    iso: OrderIso, gen1: Generator, gen2: Generator, tol: Tolerance = DEFAULT_TOL
) -> float:
    residual = intertwining_residual(iso, gen1, gen2)
    bound = tol.bound(_residual_scale(iso, gen1, gen2))
    if residual > bound:
        raise NotIntertwining(
            f"intertwining residual {residual:.3e} exceeds tolerance {bound:.3e}"
        )
    return residual


def certify(
    iso: OrderIso, form1: GraphForm, form2: GraphForm, tol: Tolerance = DEFAULT_TOL
) -> VerificationReport:
    """Verify the rigidity identities of an intertwining order isomorphism.

    Requires the intertwining residual to vanish within tolerance and both
    forms to be irreducible.  Checks, each with its residual:

    * ``operator_constant``: U*U = beta I and U U* = beta I for one beta;
    * ``measure_identity``: h(y)^2 m2(y) = beta m1(tau(y)) for all y;
    * ``form_scaling``: Q2(U e_i, U e_j) = beta Q1(e_i, e_j) on basis pairs;
    * ``scaling_excessive``: h is excessive for the target generator;
    * ``scaling_constancy`` and ``measure_pushforward``: when both forms
      are recurrent, h is constant and tau pushes m2 to a multiple of m1
      (skipped, with the observed h ratio recorded, otherwise).
    """
    gen1 = generator(form1)
    gen2 = generator(form2)
    require_intertwining(iso, gen1, gen2, tol)
    if not (is_irreducible(form1) and is_irreducible(form2)):
        raise NotIrreducible("certification requires irreducible forms")

    report = VerificationReport()
    beta = operator_constant(iso)
    u = iso.matrix()
    u_star = adjoint(iso)
    eye1 = beta * np.eye(len(iso.source))
    eye2 = beta * np.eye(len(iso.target))
    op_residual = max(
        float(np.max(np.abs(u_star @ u - eye1))),
        float(np.max(np.abs(u @ u_star - eye2))),
    )
    report.add(
        "operator_constant", op_residual, tol.bound(max(1.0, beta)),
        detail=f"beta={beta!r}",
    )

    pullback = beta * iso.source.m[iso.tau_indices]
    measure_residual = float(
        np.max(np.abs(iso.h_values**2 * iso.target.m - pullback) / pullback)
    )
    report.add("measure_identity", measure_residual, tol.bound(1.0))

    gram2 = u.T @ form2.form_matrix @ u
    gram1 = beta * form1.form_matrix
    form_scale = max(1.0, float(np.max(np.abs(gram1))), float(np.max(np.abs(gram2))))
    report.add(
        "form_scaling", float(np.max(np.abs(gram2 - gram1))), tol.bound(form_scale)
    )

    flow = gen2.L @ iso.h_values
    exc_scale = max(
        1.0, float(np.max(np.abs(gen2.L))) * max(1.0, float(np.max(iso.h_values)))
    )
    report.add(
        "scaling_excessive", max(0.0, -float(np.min(flow))), tol.bound(exc_scale)
    )

    ratio = float(np.max(iso.h_values) / np.min(iso.h_values))
    if is_recurrent(form1) and is_recurrent(form2):
        report.add("scaling_constancy", ratio - 1.0, tol.bound(1.0))
        h_const = float(np.mean(iso.h_values))
        alpha = beta / h_const**2
        pushed = iso.target.m[iso.sigma_indices]
        push_residual = float(
            np.max(np.abs(pushed - alpha * iso.source.m) / (alpha * iso.source.m))
        )
        report.add(
            "measure_pushforward", push_residual, tol.bound(1.0),
            detail=f"alpha={alpha!r}",
        )
    else:
        report.skip(
            "scaling_constancy",
            f"pair not recurrent; observed h max/min ratio = {ratio!r}",
        )
    return report


def doob_pair(
    form: GraphForm, h_excessive: VertexFunction, tol: Tolerance = DEFAULT_TOL
) -> tuple[GraphForm, OrderIso]:
    """Conjugate a form by a strictly positive excessive function.

    The returned form lives on the measure h^2 m with generator
    M_{1/h} L M_h, re-extracted as conductances b2(x,y) = h(x) h(y) b(x,y)
    and killing c2(x) = h(x) m(x) (L h)(x); c2 >= 0 exactly because h is
    excessive.  The accompanying order isomorphism (tau = id, scaling 1/h)
    intertwines the two forms with operator constant 1.
    """
    h = form.space.vector(h_excessive)
    if np.any(h <= 0.0) or not np.all(np.isfinite(h)):
        raise NonPositive("the conjugating function must be strictly positive")
    gen = generator(form)
    if not is_excessive(gen, h, tol):
        raise NotExcessive("the conjugating function must be excessive")

    names = form.space.vertices
    b2 = {}
    for (x, y), weight in form.b.items():
        i, j = form.space.index(x), form.space.index(y)
        b2[(x, y)] = h[i] * h[j] * weight
    c2 = h * form.space.m * (gen.L @ h)
    # diagonal remainders can dip just below zero in floating point
    floor = -tol.bound(max(1.0, float(np.max(np.abs(gen.L))) * float(np.max(h))))
    if np.any(c2 < floor):
        raise NotExcessive("conjugation produced negative killing; h is not excessive")
    c2 = np.maximum(c2, 0.0)

    space2 = MeasureSpace(names, h**2 * form.space.m)
    form2 = GraphForm(space2, b2, c2)
    iso = OrderIso(
        source=form.space,
        target=space2,
        tau={v: v for v in names},
        h={v: 1.0 / h[i] for i, v in enumerate(names)},
        beta=1.0,
    )
    return form2, iso


def with_beta(iso: OrderIso, beta: float) -> OrderIso:
    return replace(iso, beta=float(beta))
