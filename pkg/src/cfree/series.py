"""Truncated Laurent series and the transform tower.

A series stores complex coefficients from a fixed lowest exponent
(``valuation``, capped below at -1) through a highest reliable exponent
(``order``); arithmetic tracks how far results stay trustworthy.  On top of
the arithmetic sit the moment series h(t), k(t) = t h(t), compositional
inversion by Newton iteration, the free cumulant recursion, and the two-state
R-transform with its guaranteed pole cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleCancellationError, SeriesError
from .reports import CheckReport, make_report
from .states import MomentData

MIN_VALUATION = -1


@dataclass(frozen=True)
class TruncatedLaurentSeries:
    """Coefficients for exponents valuation .. valuation + len(coeffs) - 1."""

    valuation: int
    coeffs: tuple

    def __post_init__(self):
        if self.valuation < MIN_VALUATION:
            raise SeriesError(f"valuation {self.valuation} below the cap {MIN_VALUATION}")
        if not self.coeffs:
            raise SeriesError("a series needs at least one retained coefficient")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    # -- structure ----------------------------------------------------------

    @property
    def order(self) -> int:
        """Highest retained exponent."""
        return self.valuation + len(self.coeffs) - 1

    def coefficient(self, n: int) -> complex:
        if n < self.valuation:
            return 0.0 + 0.0j
        if n > self.order:
            raise SeriesError(f"coefficient {n} beyond retained order {self.order}")
        return self.coeffs[n - self.valuation]

    def normalized(self) -> "TruncatedLaurentSeries":
        """Drop exactly-zero leading coefficients (keeping at least one)."""
        coeffs = list(self.coeffs)
        val = self.valuation
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs.pop(0)
            val += 1
        return TruncatedLaurentSeries(val, tuple(coeffs))

    def truncate(self, order: int) -> "TruncatedLaurentSeries":
        if order < self.valuation:
            raise SeriesError("cannot truncate below the valuation")
        keep = order - self.valuation + 1
        return TruncatedLaurentSeries(self.valuation, self.coeffs[:keep])

    def shift(self, k: int) -> "TruncatedLaurentSeries":
        """Multiply by t**k."""
        return TruncatedLaurentSeries(self.valuation + k, self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, oth) -> "TruncatedLaurentSeries":
        oth = _coerce(oth, self.order)
        val = min(self.valuation, oth.valuation)
        order = min(self.order, oth.order)
        if order < val:
            raise SeriesError("operands share no reliable exponents")
        n = order - val + 1
        out = np.zeros(n, dtype=complex)
        for s in (self, oth):
            lo = s.valuation - val
            take = min(len(s.coeffs), n - lo)
            out[lo:lo + take] += np.asarray(s.coeffs[:take])
        return TruncatedLaurentSeries(val, tuple(out))

    def __neg__(self) -> "TruncatedLaurentSeries":
        return TruncatedLaurentSeries(self.valuation, tuple(-c for c in self.coeffs))

    def __sub__(self, oth) -> "TruncatedLaurentSeries":
        return self + (-_coerce(oth, self.order))

    def __mul__(self, oth) -> "TruncatedLaurentSeries":
        if np.isscalar(oth):
            return TruncatedLaurentSeries(
                self.valuation, tuple(complex(oth) * c for c in self.coeffs))
        a, b = self, oth
        val = a.valuation + b.valuation
        if val < MIN_VALUATION:
            a = a.normalized()
            b = b.normalized()
            val = a.valuation + b.valuation
            if val < MIN_VALUATION:
                raise SeriesError("product valuation would drop below the cap")
        order = min(a.order + b.valuation, b.order + a.valuation)
        conv = np.convolve(np.asarray(a.coeffs), np.asarray(b.coeffs))
        keep = order - val + 1
        return TruncatedLaurentSeries(val, tuple(conv[:keep]))

    __rmul__ = __mul__

    def reciprocal(self) -> "TruncatedLaurentSeries":
        s = self.normalized()
        lead = s.coeffs[0]
        if lead == 0:
            raise SeriesError("reciprocal of a series with zero leading coefficient")
        if -s.valuation < MIN_VALUATION:
            raise SeriesError("reciprocal valuation would drop below the cap")
        n = len(s.coeffs)
        u = np.asarray(s.coeffs) / lead          # 1 + t * (...)
        inv = np.zeros(n, dtype=complex)
        inv[0] = 1.0
        for m in range(1, n):
            inv[m] = -np.dot(u[1:m + 1], inv[m - 1::-1][:m])
        return TruncatedLaurentSeries(-s.valuation, tuple(inv / lead))

    def compose(self, g: "TruncatedLaurentSeries") -> "TruncatedLaurentSeries":
        """self(g(t)) for g with valuation >= 1."""
        g = g.normalized()
        if g.valuation < 1:
            raise SeriesError("composition needs inner valuation >= 1")
        order = min(g.order, (self.order + 1) * g.valuation - 1)
        if self.valuation < 0:
            head = self.coefficient(-1) * g.reciprocal().truncate(order)
            tail = TruncatedLaurentSeries(0, self.coeffs[1:]) if len(self.coeffs) > 1 \
                else TruncatedLaurentSeries(0, (0.0,))
            return (head + tail.compose(g)).truncate(order)
        acc = TruncatedLaurentSeries(0, (self.coeffs[-1],) + (0.0,) * order)
        for k in range(len(self.coeffs) - 2, -1, -1):
            acc = (acc * g).truncate(order) + self.coeffs[k]
            acc = acc.truncate(order)
        # account for a positive valuation: self = t^v * (series handled above)
        if self.valuation > 0:
            gpow = g
            for _ in range(self.valuation - 1):
                gpow = (gpow * g).truncate(order)
            acc = (acc * gpow).truncate(order)
        return acc

    def derivative(self) -> "TruncatedLaurentSeries":
        if self.valuation < 0 and self.coeffs[0] != 0:
            raise SeriesError("derivative would need valuation below the cap")
        coeffs = [(self.valuation + k) * c for k, c in enumerate(self.coeffs)]
        if self.valuation <= 0:
            # the constant term dies; exponents resume at max(valuation, 0)
            drop = 1 - self.valuation
            return TruncatedLaurentSeries(0, tuple(coeffs[drop:]) or (0.0,))
        return TruncatedLaurentSeries(self.valuation - 1, tuple(coeffs))

    def __call__(self, t: complex) -> complex:
        t = complex(t)
        acc = 0.0 + 0.0j
        for k in range(len(self.coeffs) - 1, -1, -1):
            acc = acc * t + self.coeffs[k]
        if self.valuation:
            acc *= t ** self.valuation
        return acc

    def to_json_obj(self) -> dict:
        return {"valuation": self.valuation,
                "coeffs": [[c.real, c.imag] for c in self.coeffs]}

    def max_abs_coeff(self) -> float:
        return max(abs(c) for c in self.coeffs)


def _coerce(x, order: int) -> TruncatedLaurentSeries:
    if isinstance(x, TruncatedLaurentSeries):
        return x
    return TruncatedLaurentSeries(0, (complex(x),) + (0.0,) * max(order, 0))


def identity_series(order: int) -> TruncatedLaurentSeries:
    """The series t."""
    return TruncatedLaurentSeries(1, (1.0,) + (0.0,) * (order - 1))


def constant_series(c, order: int) -> TruncatedLaurentSeries:
    return _coerce(c, order)


def series_from_moments(m: MomentData, which: str) -> TruncatedLaurentSeries:
    """The resolvent series h(t) = 1 + sum m_n t^n for the chosen state."""
    if which not in ("phi", "psi"):
        raise ValueError("which must be 'phi' or 'psi'")
    if m.order < 1:
        raise SeriesError("need at least first moments")
    ms = m.phi_moments if which == "phi" else m.psi_moments
    return TruncatedLaurentSeries(0, (1.0,) + tuple(ms))


def k_series(h: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
    """k(t) = t h(t)."""
    return h.shift(1)


def compositional_inverse(k: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
    """Inverse under composition of a valuation-1 series with unit leading
    coefficient, by Newton iteration out of w = t."""
    k = k.normalized()
    if k.valuation != 1:
        raise SeriesError(f"compositional inverse needs valuation 1, got {k.valuation}")
    if abs(k.coeffs[0] - 1.0) > 1e-9:
        raise SeriesError(f"leading coefficient must be 1, got {k.coeffs[0]}")
    order = k.order
    kd = k.derivative()
    w = identity_series(order)
    steps = max(1, int(np.ceil(np.log2(order + 1))) + 1)
    for _ in range(steps):
        resid = k.compose(w) - identity_series(order)
        w = (w - (resid * kd.compose(w).reciprocal()).truncate(order)).truncate(order)
    return w


def free_cumulants(moments) -> list[complex]:
    """Free cumulants from moments via the first-block recursion:
    m_n = sum_{s>=1} kappa_s sum_{i_1+...+i_s = n-s} m_{i_1} ... m_{i_s}."""
    moments = [complex(m) for m in moments]
    n_max = len(moments)
    m = [1.0 + 0.0j] + moments
    kappa = [0.0 + 0.0j] * (n_max + 1)

    def comp_sum(s, total):
        # sum over s nonnegative parts of `total` of products of moments
        if s == 0:
            return 1.0 + 0.0j if total == 0 else 0.0 + 0.0j
        acc = 0.0 + 0.0j
        for first in range(0, total + 1):
            rest = comp_sum(s - 1, total - first)
            if rest != 0:
                acc += m[first] * rest
        return acc

    for n in range(1, n_max + 1):
        val = m[n]
        for s in range(1, n):
            val -= kappa[s] * comp_sum(s, n - s)
        kappa[n] = val
    return kappa[1:]


def free_r_from_moments(moments) -> TruncatedLaurentSeries:
    """Voiculescu R-transform sum kappa_{n+1} z^n from the cumulant recursion."""
    kappa = free_cumulants(moments)
    return TruncatedLaurentSeries(0, tuple(kappa))


def cfree_r_transform(m: MomentData) -> TruncatedLaurentSeries:
    """Two-state R-transform from moment data.

    With k = t h_psi and ktilde = t h_phi, writes the inverse of k as z u(z)
    and ktilde(k^{-1}(z)) as z v(z), both with unit constant term, and returns
    (1/u - 1/v) / z.  The pole cancels because u(0) = v(0) = 1; a failure to
    cancel numerically signals inconsistent inputs.
    """
    h_psi = series_from_moments(m, "psi")
    h_phi = series_from_moments(m, "phi")
    k = k_series(h_psi)
    ktilde = k_series(h_phi)
    kinv = compositional_inverse(k)
    u = kinv.shift(-1)
    v = ktilde.compose(kinv).shift(-1)
    ru = u.reciprocal()
    rv = v.reciprocal()
    diff = ru - rv
    lead = abs(diff.coefficient(0))
    scale = max(1.0, abs(ru.coefficient(0)), abs(rv.coefficient(0)))
    if lead > 1e-12 * scale:
        raise PoleCancellationError(
            f"constant terms differ by {lead}; moment data is inconsistent")
    cleaned = diff - diff.coefficient(0)
    return cleaned.shift(-1).normalized()


def check_linearization_series(m_a: MomentData, m_b: MomentData, m_sum: MomentData,
                               order: int, tol: float = 1e-8) -> CheckReport:
    """Coefficientwise additivity of the two-state R-transform on a pair
    realized conditionally free."""
    if not (m_a.order == m_b.order == m_sum.order):
        raise SeriesError("moment data orders must match")
    if order > m_a.order - 1:
        raise SeriesError(f"order {order} needs moments past {m_a.order}")
    r_a = cfree_r_transform(m_a)
    r_b = cfree_r_transform(m_b)
    r_sum = cfree_r_transform(m_sum)
    gap = 0.0
    at = 0
    for n in range(0, order + 1):
        g = abs(r_sum.coefficient(n) - (r_a.coefficient(n) + r_b.coefficient(n)))
        if g > gap:
            gap, at = g, n
    scale = max(1.0, r_sum.max_abs_coeff(), r_a.max_abs_coeff(), r_b.max_abs_coeff())
    return make_report(
        "linearization-series",
        r_sum.coefficient(at), r_a.coefficient(at) + r_b.coefficient(at),
        tol, scale=scale,
        context={"order": order, "worst_exponent": at, "max_gap": gap})
