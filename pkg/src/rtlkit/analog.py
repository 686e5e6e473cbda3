"""Static model of the N-input memristive resistive divider.

Every input drives the summing node through its own resistor R_i; a
reference resistor R_0 = m * R_i ties the node to ground. Memristors are
treated as fixed-state resistors.

Functions accept plain Python numbers, so passing ``fractions.Fraction``
values gives exact rational results.
"""

from dataclasses import dataclass
from typing import Sequence

from .errors import ArgumentError, DomainError

R_ON = 1_000.0
R_OFF = 100_000.0


@dataclass(frozen=True)
class MemristorParams:
    r_on: float = R_ON
    r_off: float = R_OFF
    w_frac: float = 0.0

    def __post_init__(self):
        if not (0 < self.r_on <= self.r_off):
            raise DomainError(f"need 0 < r_on <= r_off, got r_on={self.r_on}, r_off={self.r_off}")
        if not (0 <= self.w_frac <= 1):
            raise DomainError(f"w_frac must lie in [0, 1], got {self.w_frac}")


def memristance(p: MemristorParams) -> float:
    """Effective resistance of a memristor whose doped region spans ``w_frac`` of the film."""
    if not (0 <= p.w_frac <= 1):
        raise DomainError(f"w_frac must lie in [0, 1], got {p.w_frac}")
    return p.w_frac * p.r_on + (1 - p.w_frac) * p.r_off


def semiconductor_resistance(resistivity, length, junction_depth, width):
    """Resistance of a diffused resistor body, rho * L / (x_j * W)."""
    for name, val in (("resistivity", resistivity), ("length", length),
                      ("junction_depth", junction_depth), ("width", width)):
        if val <= 0:
            raise DomainError(f"{name} must be positive, got {val}")
    return resistivity * length / (junction_depth * width)


@dataclass(frozen=True)
class DividerConfig:
    """Equal-resistor divider: n inputs of ``r_input`` ohms, reference ``m * r_input``."""

    n: int
    r_input: float = R_OFF
    m: float = 1.0
    v_high: float = 1.0
    v_low: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ArgumentError(f"fan-in must be a positive integer, got {self.n}")
        if self.r_input <= 0:
            raise DomainError(f"r_input must be positive, got {self.r_input}")
        if self.m <= 0:
            raise DomainError(f"m must be positive, got {self.m}")
        if not self.v_low < self.v_high:
            raise DomainError(f"need v_low < v_high, got {self.v_low}, {self.v_high}")

    @property
    def r_ref(self):
        return self.m * self.r_input

    @classmethod
    def from_memristor(cls, n, p: MemristorParams, **kw):
        return cls(n=n, r_input=memristance(p), **kw)

    @classmethod
    def from_geometry(cls, n, resistivity, length, junction_depth, width, **kw):
        r = semiconductor_resistance(resistivity, length, junction_depth, width)
        return cls(n=n, r_input=r, **kw)

    def level_voltages(self, levels):
        return [self.v_high if b else self.v_low for b in levels]


@dataclass(frozen=True)
class DividerSolution:
    v_out: float
    branch_currents: tuple
    total_current: float
    # True where the branch is reverse biased (current flows out of the node).
    # Under ideal blocking those branches carry zero current.
    blocked: tuple = ()

    @property
    def reference_current(self):
        return self.total_current


def divider_output_general(resistances: Sequence, r0, voltages: Sequence):
    """V_0 = sum(V_i / R_i) / (1/R_0 + sum(1/R_i)) for arbitrary resistors."""
    if len(resistances) == 0 or len(voltages) == 0:
        raise ArgumentError("resistances and voltages must be nonempty")
    if len(resistances) != len(voltages):
        raise ArgumentError(f"length mismatch: {len(resistances)} resistances, {len(voltages)} voltages")
    if r0 <= 0 or any(r <= 0 for r in resistances):
        raise DomainError("all resistances must be positive")
    g = [1 / r for r in resistances]
    num = sum(gi * vi for gi, vi in zip(g, voltages))
    return num / (1 / r0 + sum(g))


def _check_levels(c: DividerConfig, levels):
    if len(levels) != c.n:
        raise ArgumentError(f"expected {c.n} input levels, got {len(levels)}")


def output_for_count(c: DividerConfig, k):
    """Divider output with exactly ``k`` inputs high; the simplified equal-resistor form."""
    if not 0 <= k <= c.n:
        raise ArgumentError(f"high-input count {k} outside [0, {c.n}]")
    return (k * c.v_high + (c.n - k) * c.v_low) / (1 / c.m + c.n)


def divider_output(c: DividerConfig, levels) -> float:
    _check_levels(c, levels)
    return output_for_count(c, sum(1 for b in levels if b))


def branch_currents(c: DividerConfig, levels, blocking: bool = False) -> DividerSolution:
    """Per-branch currents into the summing node.

    With ``blocking=False`` every branch is ohmic, (V_j - V_0) / R. With
    ``blocking=True`` reverse-biased branches are treated as open circuits
    and the node is re-solved until the blocked set stops changing.
    """
    _check_levels(c, levels)
    volts = c.level_voltages(levels)
    r = c.r_input
    if not blocking:
        v0 = divider_output(c, levels)
        cur = tuple((vj - v0) / r for vj in volts)
        return DividerSolution(v0, cur, sum(cur), tuple(i < 0 for i in cur))

    active = [True] * c.n
    while True:
        g_sum = sum(1 for a in active if a) / r
        num = sum(vj for vj, a in zip(volts, active) if a) / r
        v0 = num / (1 / c.r_ref + g_sum)
        newly = [a and vj < v0 for vj, a in zip(volts, active)]
        if not any(newly):
            break
        # removing a branch below V_0 only raises V_0, so this terminates
        active = [a and not nb for a, nb in zip(active, newly)]
    cur = tuple((vj - v0) / r if a else 0.0 for vj, a in zip(volts, active))
    return DividerSolution(v0, cur, sum(cur), tuple(not a for a in active))


def conduction_power(c: DividerConfig, levels) -> float:
    """Power delivered by the input sources into the divider (ohmic branches)."""
    sol = branch_currents(c, levels)
    return sum(v * i for v, i in zip(c.level_voltages(levels), sol.branch_currents))
