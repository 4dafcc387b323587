"""Compile exact polynomials into vectorized numpy evaluators.

The symbolic modules work over ``fractions.Fraction`` and never touch floats.
Quadrature and Monte Carlo need the same polynomials evaluated on large
coordinate arrays, so this module converts a :class:`~carnotlab.poly.Poly`
into a closure over float coefficients once, up front.

Example:
    >>> from carnotlab.poly import parse_poly
    >>> ev = poly_evaluator(parse_poly("x^2 + 6*y*s", (2, 1)))
    >>> float(ev((2.0, 1.0, 0.5)))
    7.0
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .poly import Poly

Evaluator = Callable[..., np.ndarray]


def poly_evaluator(p: Poly) -> Evaluator:
    """Return ``f(coords, t=0.0) -> array`` evaluating ``p`` in float.

    ``coords`` is a sequence of ``p.nz + p.ns`` scalars or broadcastable
    arrays, ordered as the polynomial's variables; ``t`` is the time
    variable.  Powers of each coordinate are computed once per call and
    shared across terms.
    """
    n_space = p.nz + p.ns
    terms = [(float(c), exps) for exps, c in p.terms_sorted()]

    def evaluate(coords: Sequence, t=0.0) -> np.ndarray:
        if len(coords) != n_space:
            raise ValueError(
                f"expected {n_space} coordinate arrays, got {len(coords)}"
            )
        arrays = [np.asarray(c, dtype=float) for c in coords]
        arrays.append(np.asarray(t, dtype=float))
        shape = np.broadcast_shapes(*(a.shape for a in arrays))
        total = np.zeros(shape)
        # per-variable power cache, shared by all terms
        powers: list[dict[int, np.ndarray]] = [{} for _ in arrays]

        def power(i: int, e: int) -> np.ndarray:
            cache = powers[i]
            if e not in cache:
                cache[e] = arrays[i] ** e
            return cache[e]

        for coeff, exps in terms:
            term = np.full(shape, coeff)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            total += term
        return total

    return evaluate


def gauge_fourth_numeric(z_coords: Sequence, s_coords: Sequence) -> np.ndarray:
    """``rho^4 = |z|^4 + 16 |sigma|^2`` on arrays, for any H-type group."""
    zsq = sum(np.asarray(zi, dtype=float) ** 2 for zi in z_coords)
    ssq = sum(np.asarray(sl, dtype=float) ** 2 for sl in s_coords)
    return zsq * zsq + 16.0 * ssq


def gauge_numeric(z_coords: Sequence, s_coords: Sequence) -> np.ndarray:
    """The gauge ``rho`` itself on arrays."""
    return gauge_fourth_numeric(z_coords, s_coords) ** 0.25


def horizontal_gauge_gradient_sq_numeric(
    z_coords: Sequence, s_coords: Sequence
) -> np.ndarray:
    """``|grad_H rho|^2 = |z|^2 / rho^2`` on arrays.

    Undefined at the origin; callers keep their nodes away from it.
    """
    zsq = sum(np.asarray(zi, dtype=float) ** 2 for zi in z_coords)
    ssq = sum(np.asarray(sl, dtype=float) ** 2 for sl in s_coords)
    return zsq / np.sqrt(zsq * zsq + 16.0 * ssq)
