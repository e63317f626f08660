"""Radial cutoff chi, the annulus symbol rho, and their exact derivatives.

The profile is chi(xi) = phi(|xi|) with

    phi(r) = 1                       r <= 1
    phi(r) = 1 - S(3 (r - 1))        1 < r < 4/3
    phi(r) = 0                       r >= 4/3

and S(t) = h(t) / (h(t) + h(1 - t)), h(t) = exp(-s / t) for t > 0.  Inside
the transition S = expit(-u) with u = s (1/t - 1/(1-t)).

Derivatives are generated symbolically once per (d, order) as polynomials in
sigma = S and tau = 1 - S, both evaluated through ``expit`` so that nothing
overflows near the edges of the transition.  The chain rule through
r = |xi| is applied with the same trick, treating phi^(m)(r) as placeholders.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy as sp
from scipy.special import expit

from . import multiindex as mi

R_INNER = 1.0
R_OUTER = 4.0 / 3.0


@lru_cache(maxsize=None)
def _tau_derivatives(order: int):
    """Callables (a, b, sigma, tau, s) -> d^m tau / dt^m, m = 0..order.

    Expressions are polynomials in a = 1/t, b = 1/(1-t), sigma and tau, which
    keeps them free of cancellation-prone rational denominators.
    """
    a, b, sig, tau, s = sp.symbols("a b sigma tau s")
    du = s * (-a**2 - b**2)

    def total(expr):
        return (
            sp.diff(expr, a) * (-a**2)
            + sp.diff(expr, b) * b**2
            + sp.diff(expr, sig) * (-sig * tau * du)
            + sp.diff(expr, tau) * (sig * tau * du)
        )

    exprs = [tau]
    for _ in range(order):
        exprs.append(sp.expand(total(exprs[-1])))
    return tuple(sp.lambdify((a, b, sig, tau, s), e, "numpy") for e in exprs)


@lru_cache(maxsize=None)
def _radial_chain(d: int, k: tuple):
    """Callable (x_1..x_d, r, p_0..p_|k|) -> d^k/dxi^k phi(|xi|)."""
    n = sum(k)
    xs = sp.symbols(f"x0:{d}")
    r = sp.Symbol("r", positive=True)
    ps = sp.symbols(f"p0:{n + 2}")

    def partial(expr, i):
        out = sp.diff(expr, xs[i]) + sp.diff(expr, r) * xs[i] / r
        for m in range(n + 1):
            out += sp.diff(expr, ps[m]) * ps[m + 1] * xs[i] / r
        return out

    expr = ps[0]
    for i, ki in enumerate(k):
        for _ in range(ki):
            expr = partial(expr, i)
    expr = sp.simplify(expr)
    return sp.lambdify((*xs, r, *ps[: n + 1]), expr, "numpy")


def _as_points(xi, d):
    xi = np.asarray(xi, dtype=float)
    if d == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
        xi = xi[..., None]
    if xi.shape[-1] != d:
        raise ValueError(f"expected trailing axis of length {d}, got {xi.shape}")
    return xi


def chi(xi, d: int = 1, sharpness: float = 1.0) -> np.ndarray:
    xi = _as_points(xi, d)
    r = np.sqrt(np.sum(xi * xi, axis=-1))
    out = np.where(r <= R_INNER, 1.0, 0.0)
    mask = (r > R_INNER) & (r < R_OUTER)
    if np.any(mask):
        t = 3.0 * (r[mask] - 1.0)
        u = sharpness * (1.0 / t - 1.0 / (1.0 - t))
        out[mask] = expit(u)
    return out


def chi_derivative(xi, k: tuple, d: int = 1, sharpness: float = 1.0) -> np.ndarray:
    """d^k chi evaluated at the points ``xi`` (trailing axis d)."""
    k = tuple(k)
    if mi.order(k) == 0:
        return chi(xi, d, sharpness)
    xi = _as_points(xi, d)
    r = np.sqrt(np.sum(xi * xi, axis=-1))
    out = np.zeros(r.shape)
    mask = (r > R_INNER) & (r < R_OUTER)
    if not np.any(mask):
        return out
    n = mi.order(k)
    t = 3.0 * (r[mask] - 1.0)
    u = sharpness * (1.0 / t - 1.0 / (1.0 - t))
    sig, tau = expit(-u), expit(u)
    taus = _tau_derivatives(n)
    # phi^(m)(r) = 3^m tau^(m)(t)
    ps = [
        3.0**m * np.broadcast_to(taus[m](1.0 / t, 1.0 / (1.0 - t), sig, tau, sharpness), t.shape)
        for m in range(n + 1)
    ]
    comps = [xi[..., i][mask] for i in range(d)]
    out[mask] = _radial_chain(d, k)(*comps, r[mask], *ps)
    return out


def rho(xi, d: int = 1, sharpness: float = 1.0) -> np.ndarray:
    xi = _as_points(xi, d)
    return chi(xi / 2.0, d, sharpness) - chi(xi, d, sharpness)


def rho_derivative(xi, k: tuple, d: int = 1, sharpness: float = 1.0) -> np.ndarray:
    xi = _as_points(xi, d)
    n = mi.order(k)
    return 2.0**-n * chi_derivative(xi / 2.0, k, d, sharpness) - chi_derivative(
        xi, k, d, sharpness
    )
