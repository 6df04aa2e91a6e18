"""Closed-form limiting probabilities and moment predictions.

The limiting law assigns a module type N the mass

    1 / (|Aut(N)| |N|^u) * prod_i prod_{j>=1} (1 - q_i^(-u-j)),

one double product factor per prime in the ambient set P. Infinite products
are truncated with explicit tail control: predictions carry the value and a
rigorous upper bound on the truncation error, computed by interval
arithmetic (the lower product uses C_i - tail_i). Internal arithmetic is
50-digit decimal, far below any Monte Carlo resolution; partition sums use
exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .errors import ParameterError
from .modules import ModuleType, count_aut, module_size

_DIGITS = 50
DEFAULT_TOL = Fraction(1, 10 ** 9)


@dataclass(frozen=True)
class Prediction:
    value: Decimal
    truncation_bound: Decimal

    def __float__(self):
        return float(self.value)


def _tol_fraction(tol) -> Fraction:
    tol = Fraction(tol) if not isinstance(tol, float) else Fraction(tol)
    if tol <= 0:
        raise ParameterError("tolerance must be positive")
    return tol


def _truncated_factor(q: int, u: int, tol_share: Fraction):
    """(product over j <= J of (1 - q^-u-j), exact tail bound) with
    tail(J) = sum_{j>J} q^(-u-j) = q^(-u-J)/(q-1) < tol_share."""
    J = 1
    while Fraction(1, q ** (u + J) * (q - 1)) >= tol_share:
        J += 1
    prod = Decimal(1)
    qd = Decimal(q)
    for j in range(1, J + 1):
        prod *= 1 - 1 / qd ** (u + j)
    return prod, Fraction(1, q ** (u + J) * (q - 1))


def _frac_to_dec(x: Fraction) -> Decimal:
    return Decimal(x.numerator) / Decimal(x.denominator)


def predicted_probability(N: ModuleType, P, u: int, tol=DEFAULT_TOL) -> Prediction:
    """Limiting probability of observing type N among the primes P."""
    P = list(P)
    if u < 0:
        raise ParameterError("u must be nonnegative")
    tol = _tol_fraction(tol)
    known = set(P)
    for prime in N.primes():
        if prime not in known:
            raise ParameterError(f"type component at {prime} outside the prime set")
    lead = Fraction(1, count_aut(N) * module_size(N) ** u)
    with localcontext() as ctx:
        ctx.prec = _DIGITS
        share = tol / (2 * len(P)) if P else tol
        hi = _frac_to_dec(lead)
        lo = _frac_to_dec(lead)
        for prime in P:
            prod, tail = _truncated_factor(prime.q, u, share)
            hi *= prod
            lo *= max(prod - _frac_to_dec(tail), Decimal(0))
        return Prediction(hi, hi - lo)


def predicted_moment(N: ModuleType, u: int) -> Fraction:
    """Limiting expected number of surjections onto N: exactly |N|^-u."""
    if u < 0:
        raise ParameterError("u must be nonnegative")
    return Fraction(1, module_size(N) ** u)


def _aut_inverse_box_sum(q: int, u: int, cap_exponent: int, cap_parts: int) -> Fraction:
    """Exact sum over partitions in the box of 1 / (|Aut| * q^(u |lambda|)).

    Runs over conjugate-partition columns c_1 >= ... >= c_E (heights <= the
    part cap), using |Aut| = q^(sum c_k^2) * prod_k prod_{i<=c_k - c_{k+1}}
    (1 - q^-i); a direct DP, so caps like (20, 20) stay cheap while agreeing
    with literal enumeration on small boxes.
    """
    E, m = cap_exponent, cap_parts
    if E == 0 or m == 0:
        return Fraction(1)
    inv_prod = [Fraction(1)]
    for i in range(1, m + 1):
        inv_prod.append(inv_prod[-1] / (1 - Fraction(1, q ** i)))
    nxt = [Fraction(1)] + [Fraction(0)] * m  # chain terminator c_(E+1) = 0
    for _ in range(E, 0, -1):
        cur = []
        for c in range(m + 1):
            s = sum(inv_prod[c - c2] * nxt[c2] for c2 in range(c + 1))
            cur.append(Fraction(1, q ** (c * c + u * c)) * s)
        nxt = cur
    return sum(nxt)


def partial_sum(P, u: int, cap_exponent: int, cap_parts: int, tol=DEFAULT_TOL) -> Prediction:
    """Total predicted mass of all types within the exponent/parts box.

    Factorizes over primes: the box of types is a product of per-prime
    partition boxes and the law is multiplicative across primes, so the sum
    is prod_i C_i(u) * S_i(box). Monotone nondecreasing in either cap.
    """
    P = list(P)
    if cap_exponent < 0 or cap_parts < 0:
        raise ParameterError("caps must be nonnegative")
    tol = _tol_fraction(tol)
    with localcontext() as ctx:
        ctx.prec = _DIGITS
        share = tol / (2 * len(P)) if P else tol
        hi = Decimal(1)
        lo = Decimal(1)
        for prime in P:
            prod, tail = _truncated_factor(prime.q, u, share)
            box = _frac_to_dec(_aut_inverse_box_sum(prime.q, u, cap_exponent, cap_parts))
            hi *= prod * box
            lo *= max(prod - _frac_to_dec(tail), Decimal(0)) * box
        return Prediction(hi, hi - lo)
