"""Closed-form Haar ensemble averages and the bounds built from them.

Everything here reduces to ratios of signed sums of powers of two whose
exponents are integers once gamma*N and p*N are integers, so all formulas
are evaluated in exact integer/rational arithmetic and converted to floats
only through logarithms at the end.  That keeps the bounds usable for
asymptotic checks up to N ~ 64 where 2^(2N) is far beyond float range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

LN2 = math.log(2.0)

REPLICA2_KINDS = ("purity_S", "purity_RS", "prob_sq", "cond_weight_sq")

# cycle counts of the two elements of S2: identity e and the swap g
_CYCLES = {"e": 2, "g": 1}
_COMPOSE_G = {"e": "g", "g": "e"}  # g * sigma


def as_fraction(x) -> Fraction:
    """Exact conversion; strings like '1/3' are accepted, floats are taken
    at their binary value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class TheoryParams:
    """Q size N with rational gamma = n_R/N and p = |S|/N; both products
    must be integers because the closed forms count qubits."""

    n: int
    gamma: Fraction
    p: Fraction

    def __init__(self, n: int, gamma, p):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "gamma", as_fraction(gamma))
        object.__setattr__(self, "p", as_fraction(p))
        if self.n < 1:
            raise ValueError(f"N must be >= 1, got {self.n}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        for name, frac in (("gamma", self.gamma), ("p", self.p)):
            if (frac * self.n).denominator != 1:
                raise ValueError(
                    f"{name} * N = {frac} * {self.n} is not an integer qubit count"
                )

    @property
    def n_r(self) -> int:
        return int(self.gamma * self.n)

    @property
    def n_s(self) -> int:
        return int(self.p * self.n)

    @property
    def n_e(self) -> int:
        return self.n - self.n_s

    @classmethod
    def from_counts(cls, n: int, n_r: int, n_s: int) -> "TheoryParams":
        return cls(n, Fraction(n_r, n), Fraction(n_s, n))


def _pow2(exponent: int) -> Fraction:
    return Fraction(2) ** int(exponent)


def _ln(fr: Fraction) -> float:
    if fr <= 0:
        raise ValueError(f"log of non-positive rational {fr}")
    return math.log(fr.numerator) - math.log(fr.denominator)


# region exponents (cycle counts) per replica-2 quantity: the R factor uses
# tau or g*tau, S uses g*sigma or drops out (projected outcomes), E always
# uses sigma.
_REGION_RULES = {
    "purity_S": (lambda tau: _CYCLES[tau], lambda sig: _CYCLES[_COMPOSE_G[sig]]),
    "purity_RS": (lambda tau: _CYCLES[_COMPOSE_G[tau]], lambda sig: _CYCLES[_COMPOSE_G[sig]]),
    "prob_sq": (lambda tau: _CYCLES[tau], lambda sig: 0),
    "cond_weight_sq": (lambda tau: _CYCLES[_COMPOSE_G[tau]], lambda sig: 0),
}


def replica2_moment_exact(kind: str, params: TheoryParams) -> Fraction:
    """Exact two-replica Haar average via the S2 x S2 Weingarten kernel
    (delta(sigma,tau) - 2^-N delta(g sigma, tau)) / (2^(2N) - 1) with
    per-region exponents."""
    if kind not in REPLICA2_KINDS:
        raise ValueError(f"unknown replica-2 kind {kind!r}; use one of {REPLICA2_KINDS}")
    c_r, c_s = _REGION_RULES[kind]
    n, n_r, n_s, n_e = params.n, params.n_r, params.n_s, params.n_e
    total = Fraction(0)
    for sigma in ("e", "g"):
        for tau in ("e", "g"):
            weight = Fraction(0)
            if sigma == tau:
                weight += 1
            if _COMPOSE_G[sigma] == tau:
                weight -= Fraction(1, 2**n)
            if weight == 0:
                continue
            exponent = n_r * c_r(tau) + n_s * c_s(sigma) + n_e * _CYCLES[sigma]
            total += weight * _pow2(exponent)
    return total / (_pow2(2 * n_r) * (2 ** (2 * n) - 1))


def replica2_closed_form(kind: str, params: TheoryParams) -> Fraction:
    """The four spelled-out closed forms; an independent code path kept for
    cross-checking the kernel sum."""
    n, n_r, n_s = params.n, params.n_r, params.n_s
    if kind == "purity_S":
        exps = (n_r + n + n_s, 2 * n_r + 2 * n - n_s, n_r + n - n_s, 2 * n_r + n_s)
    elif kind == "purity_RS":
        exps = (2 * n_r + n_s + n, n_r + 2 * n - n_s, n_r + n_s, 2 * n_r - n_s + n)
    elif kind == "prob_sq":
        exps = (n_r + n - n_s, 2 * n_r + 2 * n - 2 * n_s, n_r + n - 2 * n_s, 2 * n_r - n_s)
    elif kind == "cond_weight_sq":
        exps = (n_r + 2 * n - 2 * n_s, 2 * n_r + n - n_s, n_r - n_s, 2 * n_r + n - 2 * n_s)
    else:
        raise ValueError(f"unknown replica-2 kind {kind!r}; use one of {REPLICA2_KINDS}")
    a, b, c, d = (_pow2(e) for e in exps)
    return (a + b - c - d) / (_pow2(2 * n_r) * (2 ** (2 * n) - 1))


def replica2_moment(kind: str, params: TheoryParams) -> float:
    return float(replica2_moment_exact(kind, params))


def mean_outcome_probability(params: TheoryParams) -> Fraction:
    """First moment E[p(o_S)]: the single-replica twirl sends the Q state to
    I/2^N, so every outcome has average probability 2^-pN."""
    return Fraction(1, 2**params.n_s)


def lambda_value(params: TheoryParams) -> float:
    """-ln of the annealed ratio E[Tr rho~_R(o_S)^2] / E[p(o_S)^2]."""
    ratio = replica2_moment_exact("cond_weight_sq", params) / replica2_moment_exact(
        "prob_sq", params
    )
    return -_ln(ratio)


def bound_decoupling(params: TheoryParams) -> float:
    """Upper bound on E || rho_RS - I/2^((gamma+p)N) ||_1."""
    n, n_r, n_s = params.n, params.n_r, params.n_s
    num = (2 ** (2 * n_s) - 1) * (2 ** (n_r + n) - 1)
    if num == 0:
        return 0.0
    return math.exp(0.5 * _ln(Fraction(num, 2 ** (2 * n) - 1)))


def bound_mutual_information(params: TheoryParams) -> float | None:
    """Lower bound on E[I_RS] in nats; None where p <= (1-gamma)/2, where
    the bound is not claimed."""
    if params.p <= (1 - params.gamma) / 2:
        return None
    n, n_r, n_s = params.n, params.n_r, params.n_s
    num = _pow2(2 * (n_r + n_s)) - _pow2(2 * (n_r + n_s - n))
    den = _pow2(2 * n_s) + _pow2(n + n_r) - 1 - _pow2(2 * n_s + n_r - n)
    return _ln(num / den)


def bound_drs_upper(params: TheoryParams) -> float:
    """Upper bound gamma*N*ln2 - Lambda on the Haar-averaged D_RS."""
    return params.n_r * LN2 - lambda_value(params)


def bound_drs_lower(params: TheoryParams) -> float:
    """(gamma+p-1) N ln2 for p > 1-gamma, else 0; holds per realization for
    every unitary (Schmidt-rank ceiling), not just on average."""
    if params.p <= 1 - params.gamma:
        return 0.0
    return (params.n_r + params.n_s - params.n) * LN2


def critical_points(gamma) -> tuple[float, float]:
    """(p_c for the entanglement transition, p_c for measurement
    invisibility) in the infinite-depth limit."""
    g = as_fraction(gamma)
    if not 0 < g < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    return float((1 - g) / 2), float(1 - g)
