import itertools

import numpy as np

import dirikit as dk
from dirikit.search import SearchOptions, residual_bound


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def brute_force_intertwiners(form1, form2, opts: SearchOptions):
    """Oracle: test every bijection directly against the residual bound.

    Independent of the pruned search: plain permutation enumeration with
    the residual evaluated by matrix products.
    """
    n1, n2 = len(form1.space), len(form2.space)
    if n1 != n2:
        return []
    bound = residual_bound(form1, form2, opts)
    gen1, gen2 = dk.generator(form1), dk.generator(form2)
    accepted = []
    for perm in itertools.permutations(range(n1)):
        tau = {
            form2.space.vertices[i]: form1.space.vertices[perm[i]] for i in range(n2)
        }
        h = {
            y: float(np.sqrt(form1.space.m[perm[i]] / form2.space.m[i]))
            for i, y in enumerate(form2.space.vertices)
        }
        iso = dk.OrderIso(form1.space, form2.space, tau, h)
        if dk.intertwining_residual(iso, gen1, gen2) <= bound:
            accepted.append(iso)
    accepted.sort(key=lambda iso: tuple(iso.tau[y] for y in sorted(iso.tau)))
    return accepted


def tau_signature(iso):
    return tuple(iso.tau[y] for y in sorted(iso.tau))
