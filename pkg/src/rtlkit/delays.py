"""Per-gate propagation delay tables.

Resistive-threshold cells switch in constant time regardless of fan-in
(0.45 us for the AND family, 0.60 us for the OR family). Static-CMOS delays
are piecewise linear in fan-in through measured anchor points at 3, 10 and
1000 inputs, extrapolated linearly outside that range. CMOS AND/OR add one
inverter delay to the NAND/NOR value; the CMOS inverter uses the NAND curve
evaluated at fan-in 1.
"""

from dataclasses import dataclass, field

US = 1e-6

RTL_DELAYS = {
    "NAND": 0.45 * US,
    "AND": 0.45 * US,
    "NOR": 0.60 * US,
    "OR": 0.60 * US,
    "NOT": 0.45 * US,
}

CMOS_ANCHORS = {
    "NAND": ((3, 0.47 * US), (10, 0.54 * US), (1000, 0.65 * US)),
    "NOR": ((3, 0.50 * US), (10, 0.52 * US), (1000, 0.66 * US)),
}


def piecewise_linear(points, x):
    """Linear interpolation through sorted (x, y) points, extrapolating the end segments."""
    if len(points) < 2:
        raise ValueError("need at least two anchor points")
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x <= x1:
            break
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


@dataclass(frozen=True)
class DelayModel:
    rtl: dict = field(default_factory=lambda: dict(RTL_DELAYS))
    cmos_anchors: dict = field(default_factory=lambda: dict(CMOS_ANCHORS))

    def cmos_not(self):
        return piecewise_linear(self.cmos_anchors["NAND"], 1)

    def delay(self, kind: str, fan_in: int, technology: str = "RTL") -> float:
        kind = kind.upper()
        if technology.upper() == "RTL":
            return self.rtl[kind]
        if kind == "NOT":
            return self.cmos_not()
        if kind in ("NAND", "NOR"):
            return piecewise_linear(self.cmos_anchors[kind], fan_in)
        base = "NAND" if kind == "AND" else "NOR"
        return piecewise_linear(self.cmos_anchors[base], fan_in) + self.cmos_not()


DEFAULT_DELAYS = DelayModel()
