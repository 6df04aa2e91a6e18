"""Entry distributions, balance auditing, and seeded matrix sampling.

Weights are exact rationals so audited balance margins are exact; decimal
inputs are converted with denominator 10^12 and the vector is renormalized
to sum to exactly one. Sampling uses counter-based Philox streams keyed by
(master seed, trial index), so any parallel schedule reproduces the same
matrices bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .domains import (
    GAUSSIAN,
    INTEGERS,
    POLYNOMIALS,
    ZI,
    ZZ,
    DomainId,
    Element,
    elementary_quotient_ideals,
    gauss_elem,
    int_elem,
    parse_element,
    poly_domain,
    poly_elem,
    residue_vector,
)
from .errors import ParameterError

_WEIGHT_DENOM = 10 ** 12


def _to_fraction(w) -> Fraction:
    if isinstance(w, Fraction):
        return w
    if isinstance(w, int):
        return Fraction(w)
    if isinstance(w, str):
        return Fraction(w)
    if isinstance(w, float):
        return Fraction(round(w * _WEIGHT_DENOM), _WEIGHT_DENOM)
    raise ParameterError(f"cannot interpret weight {w!r}")


@dataclass(frozen=True)
class EntryDistribution:
    """Finitely supported probability law on domain elements."""

    domain: DomainId
    support: tuple      # Elements, distinct
    weights: tuple      # Fractions, positive, exact sum 1

    @staticmethod
    def of(domain: DomainId, support, weights) -> "EntryDistribution":
        support = tuple(support)
        if len(set(support)) != len(support):
            raise ParameterError("support elements must be distinct")
        if len(support) != len(weights) or not support:
            raise ParameterError("need matching nonempty support and weights")
        for s in support:
            if s.domain != domain:
                raise ParameterError(f"support element {s} outside {domain}")
        fracs = [_to_fraction(w) for w in weights]
        if any(w <= 0 for w in fracs):
            raise ParameterError("weights must be positive")
        total = sum(fracs)
        if abs(total - 1) > Fraction(1, 10 ** 12):
            raise ParameterError(f"weights sum to {float(total)}, not 1")
        fracs = [w / total for w in fracs]  # exact renormalization
        return EntryDistribution(domain, support, tuple(fracs))

    def thresholds(self) -> np.ndarray:
        """Cumulative 64-bit cutoffs for searchsorted sampling (all but last)."""
        cum = Fraction(0)
        ts = []
        for w in self.weights[:-1]:
            cum += w
            ts.append((cum.numerator << 64) // cum.denominator)
        return np.array(ts, dtype=np.uint64)

    def __str__(self):
        from .domains import format_element
        pairs = ", ".join(f"{format_element(s)}: {w}" for s, w in zip(self.support, self.weights))
        return "{" + pairs + "}"


def builtin_distribution(name: str, params: dict | None = None,
                         domain: DomainId | None = None) -> EntryDistribution:
    """Named entry laws: bernoulli01, uniform-support, gaussian-basis, poly-powers."""
    params = dict(params or {})
    if name == "bernoulli01":
        q = _to_fraction(params.pop("q", Fraction(1, 2)))
        domain = domain or ZZ
        _reject_extra(name, params)
        if not 0 < q < 1:
            raise ParameterError("bernoulli01 needs 0 < q < 1")
        zero, one = _zero_one(domain)
        return EntryDistribution.of(domain, (zero, one), (1 - q, q))
    if name == "uniform-support":
        if domain is None:
            raise ParameterError("uniform-support needs a domain")
        support = params.pop("support", None)
        _reject_extra(name, params)
        if not support:
            raise ParameterError("uniform-support needs a support list")
        elems = [s if isinstance(s, Element) else parse_element(domain, s) for s in support]
        w = Fraction(1, len(elems))
        return EntryDistribution.of(domain, elems, (w,) * len(elems))
    if name == "gaussian-basis":
        ws = params.pop("weights", None) or (Fraction(1, 3),) * 3
        _reject_extra(name, params)
        if len(ws) != 3:
            raise ParameterError("gaussian-basis takes three weights for {0, 1, i}")
        return EntryDistribution.of(ZI, (gauss_elem(0, 0), gauss_elem(1, 0), gauss_elem(0, 1)), ws)
    if name == "poly-powers":
        p = params.pop("p", None)
        m = params.pop("m", None)
        ws = params.pop("weights", None)
        _reject_extra(name, params)
        if p is None or m is None or m < 0:
            raise ParameterError("poly-powers needs a prime p and a top power m >= 0")
        support = [poly_elem(p, [0] * k + [1]) for k in range(m + 1)]
        if ws is None:
            ws = (Fraction(1, len(support)),) * len(support)
        return EntryDistribution.of(poly_domain(p), support, ws)
    raise ParameterError(f"unknown builtin distribution {name!r}")


def _reject_extra(name, params):
    if params:
        raise ParameterError(f"unexpected parameters for {name}: {sorted(params)}")


def _zero_one(domain: DomainId):
    if domain.kind == INTEGERS:
        return int_elem(0), int_elem(1)
    if domain.kind == GAUSSIAN:
        return gauss_elem(0, 0), gauss_elem(1, 0)
    return poly_elem(domain.char, []), poly_elem(domain.char, [1])


# ---------------------------------------------------------------------------
# balance auditing


@dataclass(frozen=True)
class IdealBalance:
    label: str
    p: int
    dim: int
    worst_hyperplane: str
    worst_mass: Fraction
    epsilon: Fraction


@dataclass(frozen=True)
class BalanceReport:
    modulus: str
    entries: tuple  # IdealBalance, in the auditor's deterministic order

    @property
    def overall(self) -> Fraction:
        return min((e.epsilon for e in self.entries), default=Fraction(1))

    def is_balanced(self) -> bool:
        return all(e.epsilon > 0 for e in self.entries)


def _hyperplane_directions(p: int, k: int):
    """Nonzero functionals on F_p^k up to scalar: first nonzero coefficient 1."""
    for vec in product(range(p), repeat=k):
        lead = next((c for c in vec if c), None)
        if lead == 1:
            yield vec


def balance_report(dist: EntryDistribution, domain: DomainId, modulus: Element) -> BalanceReport:
    """Audit the entry law against every elementary abelian quotient of T/(a).

    For each ideal I the auditor scans all affine hyperplanes of T/I, which
    suffices: every proper affine subspace lies inside one, so the maximal
    hyperplane mass equals the maximal proper-affine-subspace mass. An
    epsilon of zero is reported, not raised.
    """
    if dist.domain != domain:
        raise ParameterError("distribution and domain disagree")
    from .domains import format_element, poly_pretty
    entries = []
    for ideal in elementary_quotient_ideals(domain, modulus):
        vectors = [residue_vector(s, ideal) for s in dist.support]
        worst_mass = Fraction(0)
        worst = ""
        for phi in _hyperplane_directions(ideal.p, ideal.k):
            masses = {}
            for vec, w in zip(vectors, dist.weights):
                c = sum(a * b for a, b in zip(phi, vec)) % ideal.p
                masses[c] = masses.get(c, Fraction(0)) + w
            for c, mass in sorted(masses.items()):
                if mass > worst_mass:
                    worst_mass = mass
                    worst = f"{phi}·v={c}"
        entries.append(IdealBalance(ideal.label, ideal.p, ideal.k, worst,
                                    worst_mass, 1 - worst_mass))
    mod_str = poly_pretty(modulus.value) if domain.kind == POLYNOMIALS else format_element(modulus)
    return BalanceReport(mod_str, tuple(entries))


# ---------------------------------------------------------------------------
# seeded sampling


def _philox(seed: int, trial: int, n: int, u: int):
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, trial], dtype=np.uint64)
    counter = np.array([0, n, u, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def sample_index_matrix(dist: EntryDistribution, n: int, u: int, seed: int,
                        trial: int = 0) -> np.ndarray:
    """Support indices for one trial matrix, schedule-independent."""
    if n < 1 or u < 0:
        raise ParameterError("need n >= 1 and u >= 0")
    gen = _philox(seed, trial, n, u)
    draws = gen.integers(0, 2 ** 64 - 1, size=(n, n + u), dtype=np.uint64, endpoint=True)
    return np.searchsorted(dist.thresholds(), draws, side="right")


def sample_matrix(dist: EntryDistribution, n: int, u: int, seed: int, trial: int = 0):
    """One n x (n+u) grid of independent draws as domain Elements."""
    idx = sample_index_matrix(dist, n, u, seed, trial)
    return [[dist.support[j] for j in row] for row in idx.tolist()]
