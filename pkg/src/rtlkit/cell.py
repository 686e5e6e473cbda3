"""Universal resistive-threshold cell: divider, threshold device, output parity.

The same divider realizes NAND/AND (threshold between the n-1 and n high
outputs) or NOR/OR/NOT (threshold between the 0 and 1 high outputs). The
comparator asserts when V_0 is strictly above the threshold; ties resolve
to the low side. Logical inversions after the comparator set the parity.
"""

from dataclasses import dataclass, replace
from typing import Tuple, Union

from .analog import DividerConfig, divider_output, output_for_count
from .delays import DEFAULT_DELAYS, DelayModel
from .errors import ArgumentError, InfeasibleError
from .profiles import TSMC025_LIKE, DeviceProfile, format_kv, parse_kv
from .threshold import GATE_FUNCTIONS, ThresholdWindow, gate_window, select_m

# Inverter stages enabled per function, with the switch pair that enables them.
CHAIN_STAGES = {"NAND": 3, "AND": 2, "NOR": 1, "OR": 2, "NOT": 1}
SWITCHES = {"NAND": ("S1", "S4"), "AND": ("S1", "S3"), "NOR": ("S2", "S4"),
            "OR": ("S2", "S3"), "NOT": ("S2", "S4")}
ODD_PARITY = {"NAND", "NOR", "NOT"}


@dataclass(frozen=True)
class InverterChain:
    stage_thresholds: Tuple[float, ...]
    stage_vdds: Tuple[float, ...]

    def __post_init__(self):
        if not 1 <= len(self.stage_thresholds) <= 3:
            raise ArgumentError("inverter chain needs 1 to 3 stages")
        if len(self.stage_thresholds) != len(self.stage_vdds):
            raise ArgumentError("stage_thresholds and stage_vdds differ in length")

    @property
    def inversions(self):
        return len(self.stage_thresholds)


@dataclass(frozen=True)
class OpampComparator:
    v_ref: float
    delta: float
    inverting_stages: int

    def __post_init__(self):
        if self.delta <= 0:
            raise ArgumentError(f"delta must be positive, got {self.delta}")
        if self.inverting_stages < 0:
            raise ArgumentError("inverting_stages must be >= 0")

    @property
    def inversions(self):
        return self.inverting_stages


ThresholdDevice = Union[InverterChain, OpampComparator]


@dataclass(frozen=True)
class GateCellConfig:
    function: str
    n: int
    divider: DividerConfig
    device: ThresholdDevice
    effective_threshold: float
    output_parity: str
    delay: float

    def __post_init__(self):
        if self.function not in GATE_FUNCTIONS:
            raise ArgumentError(f"unsupported function {self.function!r}")
        if self.divider.n != self.n:
            raise ArgumentError("divider fan-in does not match cell fan-in")
        want = "odd" if self.function in ODD_PARITY else "even"
        if self.output_parity != want:
            raise ArgumentError(f"{self.function} needs {want} parity, got {self.output_parity}")
        if (self.device.inversions % 2 == 1) != (want == "odd"):
            raise ArgumentError("device inversion count disagrees with output parity")

    @property
    def window(self) -> ThresholdWindow:
        d = self.divider
        return gate_window(self.function, self.n, d.m, d.v_high, d.v_low)

    @property
    def inverting(self) -> bool:
        return self.output_parity == "odd"


@dataclass(frozen=True)
class CellTrace:
    v0: float
    stage_outputs: Tuple[float, ...]
    output: int


@dataclass(frozen=True)
class NoiseMargin:
    nm_low: float
    nm_high: float


def _default_m(n):
    return select_m(n) if n >= 2 else 1.0


def build_cell(function: str, n: int, profile: DeviceProfile = TSMC025_LIKE, *,
               m=None, threshold=None, delta=None, delay=None,
               delays: DelayModel = DEFAULT_DELAYS) -> GateCellConfig:
    """Assemble a cell for ``function`` at fan-in ``n``.

    The inverter chain puts its threshold at the window midpoint unless
    ``threshold`` overrides it. The opamp reference sits ``delta`` inside the
    window, measured from the all-high divider output for NAND/AND and from
    the all-low output for NOR/OR/NOT.
    """
    fn = function.upper()
    if fn not in GATE_FUNCTIONS:
        raise ArgumentError(f"unsupported gate function {function!r}")
    if int(n) != n or n < 1:
        raise ArgumentError(f"fan-in must be a positive integer, got {n}")
    if fn == "NOT" and n != 1:
        raise ArgumentError("NOT cells take exactly one input")
    if m is None:
        m = _default_m(n)
    divider = profile.divider(n, m)
    window = gate_window(fn, n, m, profile.v_high, profile.v_low)
    if not window.feasible:
        raise InfeasibleError(f"empty threshold window {window}", window)

    odd = fn in ODD_PARITY
    if profile.device == "inverter":
        th = window.midpoint if threshold is None else threshold
        stages = CHAIN_STAGES[fn]
        vdds = profile.stage_vdds[-stages:]
        if len(vdds) < stages:
            vdds = (profile.stage_vdds[0],) * (stages - len(vdds)) + vdds
        ths = [th]
        for prev in vdds[:-1]:
            ths.append((profile.v_low + prev) / 2)
        device = InverterChain(tuple(ths), tuple(vdds))
    else:
        if delta is None:
            delta = max(profile.delta_frac * window.width, profile.delta_min)
        if fn in ("NAND", "AND"):
            th = window.high - delta
        else:
            th = window.low + delta
        if threshold is not None:
            th = threshold
        device = OpampComparator(th, delta, 1 if odd else 0)

    # the window lies between attainable divider outputs, so this also bounds th
    if not window.contains(th):
        raise InfeasibleError(f"threshold {float(th):.6g} V outside window {window}", window)

    if delay is None:
        delay = delays.delay(fn, n, "RTL")
    return GateCellConfig(fn, n, divider, device, th, "odd" if odd else "even", delay)


def _check_inputs(cell, inputs):
    if len(inputs) != cell.n:
        raise ArgumentError(f"{cell.function}{cell.n} cell expects {cell.n} inputs, got {len(inputs)}")


def evaluate(cell: GateCellConfig, inputs) -> int:
    _check_inputs(cell, inputs)
    asserted = divider_output(cell.divider, inputs) > cell.effective_threshold
    return int(asserted) ^ (1 if cell.inverting else 0)


def analog_trace(cell: GateCellConfig, inputs) -> CellTrace:
    """Divider voltage and each threshold stage's rail-resolved output."""
    _check_inputs(cell, inputs)
    d = cell.divider
    v0 = divider_output(d, inputs)
    outs = []
    dev = cell.device
    if isinstance(dev, InverterChain):
        x = v0
        for th, vdd in zip(dev.stage_thresholds, dev.stage_vdds):
            x = d.v_low if x > th else vdd
            outs.append(x)
        rail = dev.stage_vdds[-1]
    else:
        x = d.v_high if v0 > dev.v_ref else d.v_low
        outs.append(x)
        mid = (d.v_low + d.v_high) / 2
        for _ in range(dev.inverting_stages):
            x = d.v_low if x > mid else d.v_high
            outs.append(x)
        rail = d.v_high
    bit = int(outs[-1] > (d.v_low + rail) / 2)
    return CellTrace(v0, tuple(outs), bit)


def required_assertion(function: str, k: int, n: int) -> bool:
    """Whether the comparator must assert when ``k`` of ``n`` inputs are high."""
    if function in ("NAND", "AND"):
        return k == n
    return k > 0


def cell_noise_margin(cell: GateCellConfig) -> NoiseMargin:
    """Divider-node margins on each side of the threshold.

    The comparator-low and comparator-high input sets are the ones the gate
    function requires, so a misplaced threshold yields a negative margin.
    """
    lows, highs = [], []
    for k in range(cell.n + 1):
        v = output_for_count(cell.divider, k)
        (highs if required_assertion(cell.function, k, cell.n) else lows).append(v)
    th = cell.effective_threshold
    nm_low = th - max(lows) if lows else float("inf")
    nm_high = min(highs) - th if highs else float("inf")
    return NoiseMargin(nm_low, nm_high)


# ------------------------------------------------------------ text format ---

def cell_to_text(cell: GateCellConfig) -> str:
    d = cell.divider
    items = {
        "function": cell.function,
        "n": cell.n,
        "m": float(d.m),
        "r_input": float(d.r_input),
        "v_high": float(d.v_high),
        "v_low": float(d.v_low),
        "effective_threshold": float(cell.effective_threshold),
        "output_parity": cell.output_parity,
        "delay": float(cell.delay),
    }
    dev = cell.device
    if isinstance(dev, InverterChain):
        items["device"] = "inverter"
        items["stage_thresholds"] = tuple(float(x) for x in dev.stage_thresholds)
        items["stage_vdds"] = tuple(float(x) for x in dev.stage_vdds)
    else:
        items["device"] = "opamp"
        items["v_ref"] = float(dev.v_ref)
        items["delta"] = float(dev.delta)
        items["inverting_stages"] = dev.inverting_stages
    return format_kv(items, header=f"{cell.function}{cell.n} cell")


def cell_from_text(text: str) -> GateCellConfig:
    raw = {k: v for k, (v, _) in parse_kv(text).items()}
    try:
        def floats(key):
            return tuple(float(x) for x in raw[key].split(","))

        n = int(raw["n"])
        divider = DividerConfig(n=n, r_input=float(raw["r_input"]), m=float(raw["m"]),
                                v_high=float(raw["v_high"]), v_low=float(raw["v_low"]))
        if raw["device"] == "inverter":
            device = InverterChain(floats("stage_thresholds"), floats("stage_vdds"))
        else:
            device = OpampComparator(float(raw["v_ref"]), float(raw["delta"]), int(raw["inverting_stages"]))
        return GateCellConfig(raw["function"], n, divider, device, float(raw["effective_threshold"]),
                              raw["output_parity"], float(raw["delay"]))
    except KeyError as e:
        raise ArgumentError(f"cell description is missing key {e.args[0]!r}") from None


def with_threshold(cell: GateCellConfig, threshold) -> GateCellConfig:
    """Copy of ``cell`` with a different comparator threshold (no window check)."""
    dev = cell.device
    if isinstance(dev, InverterChain):
        dev = replace(dev, stage_thresholds=(threshold,) + dev.stage_thresholds[1:])
    else:
        dev = replace(dev, v_ref=threshold)
    return replace(cell, device=dev, effective_threshold=threshold)
