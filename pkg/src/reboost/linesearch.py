"""One-dimensional minimization of beta -> risk(base + beta * g).

Squared loss has a closed form; other convex losses are bracketed by
doubling the derivative-sign search out from [-1, 1] and then contracted
with golden-section (robust to the exponential loss's flat tails). An
optional bound restricts the search to [-bound, bound].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scipy.special import expit

from reboost.core import DegenerateDirectionError, InvalidInputError, UnboundedDescentError
from reboost.losses import LossKind, loss_value

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LineSearchOptions:
    tolerance: float = 1e-10  # on the argument beta
    max_expansions: int = 60
    bound: float | None = None  # restrict beta to [-bound, bound]

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InvalidInputError("tolerance must be positive")
        if self.bound is not None and not self.bound > 0:
            raise InvalidInputError("bound must be positive when given")


def line_search_l2(base_preds, gvals, targets) -> float:
    """Exact minimizer of the squared-loss risk along ``gvals``."""
    base = np.asarray(base_preds, dtype=float)
    g = np.asarray(gvals, dtype=float)
    y = np.asarray(targets, dtype=float)
    gg = float(g @ g)
    if gg == 0.0:
        raise DegenerateDirectionError("direction is identically zero")
    return float(g @ (y - base) / gg)


def _make_objective(kind: LossKind, base, g, y):
    """Risk and risk-derivative closures in beta.

    Precomputing y*base and y*g turns every evaluation into a single fused
    pass over the sample, which is what makes golden-section affordable
    inside the training loop.
    """
    if kind is LossKind.SQUARED:
        r = base - y
        c0 = float(np.mean(r * r))
        c1 = 2.0 * float(np.mean(r * g))
        c2 = float(np.mean(g * g))
        return (lambda b: c0 + b * (c1 + b * c2)), (lambda b: c1 + 2.0 * c2 * b)

    yb = y * base
    yg = y * g
    if kind is LossKind.LOGISTIC:
        def risk(b: float) -> float:
            return float(np.mean(np.logaddexp(0.0, -(yb + b * yg))))

        def deriv(b: float) -> float:
            return float(-np.mean(yg * expit(-(yb + b * yg))))
    else:
        def risk(b: float) -> float:
            with np.errstate(over="ignore"):
                return float(np.mean(np.exp(-(yb + b * yg))))

        def deriv(b: float) -> float:
            with np.errstate(over="ignore"):
                return float(-np.mean(yg * np.exp(-(yb + b * yg))))
    return risk, deriv


def _expand_bracket(deriv, max_expansions: int):
    """Symmetrically double [-R, R] from R = 1 until the risk derivative
    strictly changes sign across the interval.

    The strict test matters: on a separable instance the derivative keeps
    one sign forever and merely underflows to zero along the flat tail, so
    no interval ever qualifies and UnboundedDescentError (carrying the last
    signed edge) is raised once the expansion budget runs out.
    """
    radius = 1.0
    d_neg = d_pos = 0.0
    for _ in range(max_expansions + 1):
        d_neg, d_pos = deriv(-radius), deriv(radius)
        if d_neg < 0.0 < d_pos:
            return -radius, radius
        radius *= 2.0
    radius /= 2.0
    edge = radius if d_pos <= 0.0 else -radius
    raise UnboundedDescentError(
        f"no sign change within {max_expansions} expansions (edge {edge})", edge
    )


def _golden_section(risk_of, lo: float, hi: float, tol: float) -> float:
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = risk_of(x1), risk_of(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = risk_of(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = risk_of(x2)
    return 0.5 * (lo + hi)


def line_search(kind: LossKind, base_preds, gvals, targets,
                opts: LineSearchOptions = LineSearchOptions()) -> float:
    """Minimize the empirical risk along ``gvals`` from ``base_preds``.

    With ``opts.bound`` = t the result is the minimizer over [-t, t] (by
    convexity, the clamped endpoint whenever the unconstrained minimizer
    falls outside).
    """
    base = np.asarray(base_preds, dtype=float)
    g = np.asarray(gvals, dtype=float)
    y = np.asarray(targets, dtype=float)
    if not np.any(g != 0.0):
        raise DegenerateDirectionError("direction is identically zero")
    loss_value(kind, 0.0, y)  # validate labels once up front

    if kind is LossKind.SQUARED and opts.bound is None:
        return line_search_l2(base, g, y)

    risk, deriv = _make_objective(kind, base, g, y)
    if opts.bound is not None:
        t = opts.bound
        if deriv(t) <= 0.0:
            return t
        if deriv(-t) >= 0.0:
            return -t
        if kind is LossKind.SQUARED:  # clamp the closed form (interior case)
            return float(min(max(line_search_l2(base, g, y), -t), t))
        lo, hi = -t, t
    else:
        lo, hi = _expand_bracket(deriv, opts.max_expansions)

    return _golden_section(risk, lo, hi, opts.tolerance)
