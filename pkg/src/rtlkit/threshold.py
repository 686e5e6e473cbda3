"""Threshold devices and feasible-threshold windows for N-input divider gates.

A window is the open interval of comparator thresholds for which a
divider-plus-comparator cell realizes a gate. The closed forms in
:func:`nor_window` / :func:`nand_window` are checked against
:func:`window_by_enumeration`, which walks the divider outputs directly.
"""

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

from scipy import constants, optimize

from .analog import divider_output_general
from .errors import ArgumentError, CapacityError, DomainError

GATE_FUNCTIONS = ("NAND", "NOR", "AND", "OR", "NOT")

# Number of logical inversions after the comparator decision. The comparator
# asserts on "all inputs high" for the AND family and "any input high" for the
# OR family.
_PARITY = {"NAND": 1, "NOR": 1, "NOT": 1, "AND": 0, "OR": 0, "XOR": 0, "XNOR": 1}

_SYMMETRIC = {
    "AND": lambda k, n: int(k == n),
    "NAND": lambda k, n: int(k != n),
    "OR": lambda k, n: int(k > 0),
    "NOR": lambda k, n: int(k == 0),
    "NOT": lambda k, n: int(k == 0),
    "XOR": lambda k, n: k & 1,
    "XNOR": lambda k, n: 1 - (k & 1),
}


@dataclass(frozen=True)
class ThresholdWindow:
    low: float
    high: float
    function: str

    @property
    def feasible(self) -> bool:
        return self.low < self.high

    @property
    def width(self):
        return self.high - self.low

    @property
    def midpoint(self):
        return (self.low + self.high) / 2

    def contains(self, v) -> bool:
        """Strict membership; a threshold equal to a bound is not accepted."""
        return self.low < v < self.high

    def __str__(self):
        tag = "" if self.feasible else " INFEASIBLE"
        return f"{self.function} ({float(self.low):.4f}, {float(self.high):.4f}){tag}"


def _check_config(n, m, v_h, v_l):
    if int(n) != n or n < 1:
        raise ArgumentError(f"fan-in must be a positive integer, got {n}")
    if m <= 0:
        raise ArgumentError(f"m must be positive, got {m}")
    if not v_l < v_h:
        raise ArgumentError(f"need v_l < v_h, got v_l={v_l}, v_h={v_h}")


def nor_window(n, m, v_h=1.0, v_l=0.0) -> ThresholdWindow:
    """Thresholds between the all-low and exactly-one-high divider outputs."""
    _check_config(n, m, v_h, v_l)
    low = n * m * v_l / (1 + n * m)
    high = (v_h + (n - 1) * v_l) * m / (n * m + 1)
    return ThresholdWindow(low, high, "NOR")


def nand_window(n, m, v_h=1.0, v_l=0.0) -> ThresholdWindow:
    """Thresholds between the (n-1)-high and all-high divider outputs."""
    _check_config(n, m, v_h, v_l)
    low = m * (v_l + (n - 1) * v_h) / (n * m + 1)
    high = m * n * v_h / (n * m + 1)
    return ThresholdWindow(low, high, "NAND")


def gate_window(function, n, m, v_h=1.0, v_l=0.0) -> ThresholdWindow:
    """Window for any of NAND/NOR/AND/OR/NOT (AND shares NAND's, OR and NOT share NOR's)."""
    fn = function.upper()
    if fn in ("NAND", "AND"):
        w = nand_window(n, m, v_h, v_l)
    elif fn in ("NOR", "OR", "NOT"):
        w = nor_window(n, m, v_h, v_l)
    else:
        raise ArgumentError(f"unsupported gate function {function!r}")
    return ThresholdWindow(w.low, w.high, fn)


def select_m(n: int):
    """Reference ratio placing the NAND lower bound at midrail: 1/(n-2), or 1 for n = 2."""
    if int(n) != n or n < 2:
        raise ArgumentError(f"select_m needs n >= 2, got {n}")
    if n == 2:
        return 1.0
    return 1.0 / (n - 2)


def window_by_enumeration(n, m, v_h=1.0, v_l=0.0,
                          function: Union[str, Callable[[Sequence[int]], int]] = "NAND",
                          exhaustive: bool = False) -> ThresholdWindow:
    """Separating threshold interval found by evaluating the divider on inputs.

    Named functions are symmetric, so by default only the n+1 high-input
    counts are visited. ``exhaustive=True`` walks all 2**n vectors instead
    (n <= 16); a callable function always takes that path. A function the
    comparator cannot separate comes back as an infeasible window.
    """
    _check_config(n, m, v_h, v_l)
    if n > 24:
        raise CapacityError(f"enumeration guard: n={n} > 24")

    if callable(function):
        tag = getattr(function, "__name__", "custom")
        parity = 0
        exhaustive = True
        f = function
    else:
        tag = function.upper()
        if tag not in _SYMMETRIC:
            raise ArgumentError(f"unknown function {function!r}")
        parity = _PARITY[tag]
        sym = _SYMMETRIC[tag]

        def f(bits):
            return sym(sum(bits), n)

    one = m / m  # unit resistance of the same numeric type as m
    res = [one] * n
    r0 = m * one

    if exhaustive:
        if n > 16:
            raise CapacityError(f"exhaustive enumeration guard: n={n} > 16")
        vectors = itertools.product((0, 1), repeat=n)
    else:
        vectors = ([1] * k + [0] * (n - k) for k in range(n + 1))

    low = -math.inf
    high = math.inf
    for bits in vectors:
        v0 = divider_output_general(res, r0, [v_h if b else v_l for b in bits])
        asserted = f(bits) ^ parity
        if asserted:
            high = min(high, v0)
        else:
            low = max(low, v0)
    return ThresholdWindow(low, high, tag)


# ------------------------------------------------------------ MOSFET / VTC ---

def thermal_voltage(temp):
    return constants.k * temp / constants.e


def surface_potential(n_a, n_i, temp=300.0):
    """2 (kT/q) ln(N_a / n_i)."""
    if n_a <= 0 or n_i <= 0 or temp <= 0:
        raise DomainError(f"surface_potential needs positive arguments, got n_a={n_a}, n_i={n_i}, temp={temp}")
    return 2 * thermal_voltage(temp) * math.log(n_a / n_i)


@dataclass(frozen=True)
class MosfetBiasParams:
    """Body-bias model inputs for the NMOS threshold.

    ``phi_s`` overrides the surface potential otherwise derived from
    ``n_a``, ``n_i`` and ``temp``.
    """

    v_tn0: float = 0.4
    v_bs: float = 0.0
    v_bm: float = -3.0
    v_bx: float = -0.2
    n_a: float = 1e17
    n_i: float = 1.45e10
    temp: float = 300.0
    gamma1: float = 0.5
    gamma2: float = 0.3
    c_narrow: float = 0.0
    phi_s: Optional[float] = None

    def __post_init__(self):
        if self.phi_s is None:
            if not (self.n_a >= self.n_i > 0):
                raise DomainError(f"need n_a >= n_i > 0, got n_a={self.n_a}, n_i={self.n_i}")
            if self.temp <= 0:
                raise DomainError(f"temp must be positive, got {self.temp}")

    @property
    def surface_potential(self):
        if self.phi_s is not None:
            return self.phi_s
        return surface_potential(self.n_a, self.n_i, self.temp)


def _sqrt(x, term):
    if x < 0:
        raise DomainError(f"negative radicand in {term}: {x:.6g}")
    return math.sqrt(x)


def body_effect_coefficients(p: MosfetBiasParams):
    """Return (K1, K2) for the non-uniform doping body-effect model."""
    phi = p.surface_potential
    sq_phi = _sqrt(phi, "sqrt(phi_s)")
    sq_bm = _sqrt(phi - p.v_bm, "sqrt(phi_s - v_bm)")
    sq_bx = _sqrt(phi - p.v_bx, "sqrt(phi_s - v_bx)")
    den = 2 * sq_phi * (sq_bm - sq_phi) + p.v_bm
    if den == 0:
        raise DomainError("K2 denominator vanishes (2 sqrt(phi_s)(sqrt(phi_s - v_bm) - sqrt(phi_s)) + v_bm = 0)")
    k2 = (p.gamma1 - p.gamma2) * (sq_bx - sq_phi) / den
    k1 = p.gamma2 - 2 * k2 * sq_bm
    return k1, k2


def body_bias_vtn(p: MosfetBiasParams) -> float:
    """NMOS threshold under substrate bias ``p.v_bs``."""
    phi = p.surface_potential
    k1, _ = body_effect_coefficients(p)
    sq_bs = _sqrt(phi - p.v_bs, "sqrt(phi_s - v_bs)")
    return p.v_tn0 + k1 * (sq_bs - math.sqrt(phi)) + p.c_narrow


@dataclass(frozen=True)
class InverterParams:
    v_tn: float = 0.4
    v_tp: float = -0.4
    mu_p_w_p: float = 1.0
    mu_n_w_n: float = 1.0
    v_dd: float = 1.0

    def __post_init__(self):
        if self.v_dd <= 0:
            raise DomainError(f"v_dd must be positive, got {self.v_dd}")
        if self.mu_p_w_p <= 0 or self.mu_n_w_n <= 0:
            raise DomainError("mobility-width products must be positive")

    @property
    def strength_ratio(self):
        return math.sqrt(self.mu_p_w_p / self.mu_n_w_n)


def inverter_threshold(p: InverterParams) -> float:
    """Switching threshold (V_tn + r (V_DD - |V_tp|)) / (1 + r), r = sqrt(mu_p W_p / mu_n W_n)."""
    r = p.strength_ratio
    return (p.v_tn + r * (p.v_dd - abs(p.v_tp))) / (1 + r)


def vtn_for_threshold(v_th, p: InverterParams) -> float:
    """NMOS threshold that puts the inverter switching point at ``v_th``."""
    r = p.strength_ratio
    return v_th * (1 + r) - r * (p.v_dd - abs(p.v_tp))


@dataclass(frozen=True)
class SweepRow:
    n: int
    m: float
    window: ThresholdWindow
    v_th: float
    v_tn: float
    v_bs: Optional[float]
    realizable: bool


def vtn_vth_sweep(n_range, inverter_base: InverterParams = InverterParams(),
                  bias_base: MosfetBiasParams = MosfetBiasParams(),
                  v_high=1.0, v_low=0.0, guard=0.05):
    """For each fan-in, the lowest usable NAND inverter threshold and the V_tn behind it.

    The threshold sits ``guard`` of the window width above the open lower
    bound. The substrate bias reaching the required V_tn is searched over
    [v_bm, 0]; rows that no bias in that range can reach are returned with
    ``realizable=False``.
    """
    if not 0 < guard < 1:
        raise ArgumentError(f"guard must lie in (0, 1), got {guard}")
    rows = []
    for n in n_range:
        if not 3 <= n <= 1000:
            raise ArgumentError(f"sweep fan-in must lie in [3, 1000], got {n}")
        m = select_m(n)
        w = nand_window(n, m, v_high, v_low)
        v_th = w.low + guard * w.width
        v_tn = vtn_for_threshold(v_th, inverter_base)
        v_bs = _solve_bias(bias_base, v_tn)
        rows.append(SweepRow(n, m, w, v_th, v_tn, v_bs, v_bs is not None))
    return rows


def _solve_bias(bias: MosfetBiasParams, target):
    def resid(v_bs):
        return body_bias_vtn(replace(bias, v_bs=v_bs)) - target

    a, b = bias.v_bm, 0.0
    try:
        fa, fb = resid(a), resid(b)
    except DomainError:
        return None
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        return None
    return optimize.brentq(resid, a, b, xtol=1e-12)
