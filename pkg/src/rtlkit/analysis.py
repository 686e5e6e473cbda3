"""Tolerance Monte Carlo, power estimation and RTL-vs-CMOS comparison reports."""

import csv
import io
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .analog import DividerConfig
from .cell import GateCellConfig
from .delays import DEFAULT_DELAYS, DelayModel
from .errors import ArgumentError
from .kernels import divider_matrix
from .netlist import DEFAULT_AREA, AreaModel, Netlist, component_stats
from .sim import critical_path, evaluate_batch

MODES = ("common", "independent")


@dataclass(frozen=True)
class PerturbationSpec:
    """Uniform resistor tolerance study.

    ``mode="common"`` draws one factor per trial and applies it to every
    perturbed resistor (a batch-wide process shift). ``mode="independent"``
    draws a separate factor per resistor, which averages out and gives far
    smaller output changes.
    """

    tolerance: float
    count_perturbed: int
    trials: int = 10_000
    seed: int = 0
    mode: str = "common"

    def __post_init__(self):
        if not 0 <= self.tolerance < 1:
            raise ArgumentError(f"tolerance must be in [0, 1), got {self.tolerance}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ArgumentError(f"trials must be >= 1, got {self.trials}")
        if int(self.count_perturbed) != self.count_perturbed or self.count_perturbed < 0:
            raise ArgumentError(f"count_perturbed must be >= 0, got {self.count_perturbed}")
        if self.mode not in MODES:
            raise ArgumentError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ArgumentError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Sensitivity:
    nominal: float
    max_pct_change: float
    mean_pct_change: float
    samples: np.ndarray = field(repr=False)

    def to_csv(self) -> str:
        lines = ["trial,delta_pct"]
        lines += [f"{i},{x:.12g}" for i, x in enumerate(self.samples)]
        return "\n".join(lines) + "\n"


def _scale_draws(n: int, spec: PerturbationSpec) -> np.ndarray:
    """(trials, n) resistance scale factors; unperturbed entries are 1."""
    rng = np.random.default_rng(spec.seed)
    t, k, tol = spec.trials, spec.count_perturbed, spec.tolerance
    scale = np.ones((t, n))
    if k == 0 or tol == 0:
        return scale
    if k == n:
        chosen = np.broadcast_to(np.arange(n), (t, n))
    else:
        chosen = np.argsort(rng.random((t, n)), axis=1)[:, :k]
    if spec.mode == "common":
        u = rng.uniform(1 - tol, 1 + tol, size=(t, 1)) * np.ones((1, k))
    else:
        u = rng.uniform(1 - tol, 1 + tol, size=(t, k))
    np.put_along_axis(scale, chosen, u, axis=1)
    return scale


def _perturbed_outputs(c: DividerConfig, vectors, spec: PerturbationSpec):
    """Nominal (V,) and perturbed (trials, V) divider outputs."""
    if spec.count_perturbed > c.n:
        raise ArgumentError(f"cannot perturb {spec.count_perturbed} of {c.n} resistors")
    v = np.array([[c.v_high if b else c.v_low for b in vec] for vec in vectors], dtype=float).T
    if v.shape[0] != c.n:
        raise ArgumentError(f"expected {c.n} input levels per vector, got {v.shape[0]}")
    g0 = 1.0 / float(c.r_ref)
    r = float(c.r_input)
    nominal = divider_matrix(np.full((1, c.n), 1.0 / r), np.array([g0]), v)[0]
    g = 1.0 / (r * _scale_draws(c.n, spec))
    return nominal, divider_matrix(g, np.full(spec.trials, g0), v)


def _pct(nominal, values):
    delta = values - nominal
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(nominal == 0, 0.0, 100.0 * delta / np.where(nominal == 0, 1.0, nominal))


def perturb_sensitivity(c: DividerConfig, levels, spec: PerturbationSpec) -> Sensitivity:
    """Percent change of V_0 when ``count_perturbed`` input resistors drift."""
    nominal, out = _perturbed_outputs(c, [levels], spec)
    samples = _pct(nominal[0], out[:, 0])
    mag = np.abs(samples)
    return Sensitivity(float(nominal[0]), float(mag.max()), float(mag.mean()), samples)


def analytic_worst_case(c: DividerConfig, levels, tolerance: float) -> float:
    """Largest |percent change| of V_0 with every input resistor inside the band.

    V_0 is linear-fractional in the conductances, so its extremes sit at box
    corners: high inputs at one end of the band and low inputs at the other.
    """
    if len(levels) != c.n:
        raise ArgumentError(f"expected {c.n} input levels, got {len(levels)}")
    r, g0 = float(c.r_input), 1.0 / float(c.r_ref)
    v = np.array([c.v_high if b else c.v_low for b in levels], dtype=float)
    hi = np.asarray(levels, dtype=bool)
    nominal = v.sum() / r / (g0 + c.n / r)
    worst = 0.0
    for up in (True, False):
        scale = np.where(hi == up, 1 - tolerance, 1 + tolerance)
        g = 1.0 / (r * scale)
        v0 = (g @ v) / (g0 + g.sum())
        if nominal != 0:
            worst = max(worst, abs(100.0 * (v0 - nominal) / nominal))
    return worst


def count_vectors(n: int):
    """One representative input vector per high-input count: the first k inputs high."""
    return [tuple(1 if i < k else 0 for i in range(n)) for k in range(n + 1)]


def logic_failure_rate(cell: GateCellConfig, spec: PerturbationSpec, vectors=None) -> float:
    """Fraction of (trial, vector) samples whose perturbed V_0 lands on the wrong side.

    ``vectors`` defaults to one vector per high-input count, which covers
    every nominal divider output level.
    """
    vectors = count_vectors(cell.n) if vectors is None else list(vectors)
    nominal, out = _perturbed_outputs(cell.divider, vectors, spec)
    th = float(cell.effective_threshold)
    flips = (out > th) != (nominal > th)[None, :]
    return float(flips.mean())


# ------------------------------------------------------------------- power ---

# Divider conduction of a 10-input gate, m = 1, R = 100 kOhm, all inputs at 1 V.
_DIVIDER_10 = 10 * (1 - 10 / 11) / 1e5


@dataclass(frozen=True)
class PowerModel:
    """Static power model.

    RTL gates dissipate divider conduction plus one opamp each. The opamp
    terms are calibrated so that a 10-input all-high NOR gives 10.6 uW and
    NAND gives 9.2 uW; CMOS leakage per complementary pair is calibrated to
    0.009 nW for a 10-input NOR decomposed into 5-input gates (14 pairs).
    These are fits to reported values, not predictions.
    """

    v_supply: float = 1.0
    opamp_static: float = 10.6e-6 - _DIVIDER_10
    opamp_static_and: float = 9.2e-6 - _DIVIDER_10
    inverter_leakage: float = 0.009e-9 / 14
    r_input: float = 1e5
    m: float = 1.0
    v_low: float = 0.0

    def __post_init__(self):
        for name in ("v_supply", "opamp_static", "opamp_static_and", "inverter_leakage"):
            if getattr(self, name) < 0:
                raise ArgumentError(f"{name} must be nonnegative")
        if self.r_input <= 0 or self.m <= 0:
            raise ArgumentError("r_input and m must be positive")

    def opamp(self, kind: str) -> float:
        return self.opamp_static_and if kind in ("NAND", "AND") else self.opamp_static


DEFAULT_POWER = PowerModel()


def divider_power(n: int, k, model: PowerModel = DEFAULT_POWER):
    """Power delivered into an n-input divider with k inputs high (vectorized over k)."""
    vh, vl, r = model.v_supply, model.v_low, model.r_input
    k = np.asarray(k, dtype=float)
    v0 = (k * vh + (n - k) * vl) / (1 / model.m + n)
    return (k * vh * (vh - v0) + (n - k) * vl * (vl - v0)) / r


def _pairs(kind, fan_in):
    if kind == "NOT":
        return 1
    if kind in ("NAND", "NOR"):
        return fan_in
    return fan_in + 1


def power_estimate(n: Netlist, model: PowerModel = DEFAULT_POWER, activity: float = 1.0,
                   samples: int = 256, seed: int = 0) -> float:
    """Average static power in watts.

    ``activity`` is the probability that each primary input is high. At 0 or
    1 the result is exact; in between, ``samples`` random vectors are
    propagated through the netlist to get each gate's input statistics.
    """
    if not 0 <= activity <= 1:
        raise ArgumentError(f"activity must be in [0, 1], got {activity}")
    if n.technology == "CMOS":
        return float(sum(_pairs(g.kind, g.fan_in) for g in n.gates) * model.inverter_leakage)
    if activity in (0, 1) or not n.inputs:
        x = np.full((1, len(n.inputs)), int(activity), dtype=np.uint8)
    else:
        rng = np.random.default_rng(seed)
        x = (rng.random((samples, len(n.inputs))) < activity).astype(np.uint8)
    levels = evaluate_batch(n, x, all_nets=True)
    idx = n.compiled().net_index
    total = 0.0
    for g in n.gates:
        k = levels[[idx[i] for i in g.inputs]].sum(axis=0)
        total += float(divider_power(g.fan_in, k, model).mean()) + model.opamp(g.kind)
    return total


# ------------------------------------------------------------------ report ---

METRICS = ("gates", "memristors", "transistors", "opamps", "area_um2", "delay_s", "power_w")


@dataclass(frozen=True)
class Report:
    a_name: str
    b_name: str
    a: Dict[str, float]
    b: Dict[str, float]
    deltas: Dict[str, float]
    checks: Tuple[Tuple[str, bool], ...] = ()

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_text(self) -> str:
        w = max(len(m) for m in METRICS)
        lines = [f"{'metric':<{w}}  {self.a_name:>14}  {self.b_name:>14}  {'b - a':>14}"]
        for m in METRICS:
            lines.append(f"{m:<{w}}  {self.a[m]:>14.6g}  {self.b[m]:>14.6g}  {self.deltas[m]:>14.6g}")
        for label, ok in self.checks:
            lines.append(f"{'PASS' if ok else 'FAIL'}  {label}")
        lines.append("note: noise margins are divider-node margins; transistor-level "
                     "noise margins and noise spectra are not modeled")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["metric", self.a_name, self.b_name, "delta"])
        for m in METRICS:
            wr.writerow([m, repr(self.a[m]), repr(self.b[m]), repr(self.deltas[m])])
        return buf.getvalue()


def netlist_metrics(n: Netlist, area_model: AreaModel = DEFAULT_AREA,
                    delays: DelayModel = DEFAULT_DELAYS,
                    power_model: PowerModel = DEFAULT_POWER, activity: float = 1.0) -> Dict[str, float]:
    s = component_stats(n, area_model)
    return {
        "gates": float(s.gate_total),
        "memristors": float(s.memristor_count),
        "transistors": float(s.transistor_count),
        "opamps": float(s.opamp_count),
        "area_um2": s.area,
        "delay_s": critical_path(n, delays).delay,
        "power_w": power_estimate(n, power_model, activity),
    }


def _family(name):
    for fam in ("mux", "adder"):
        if name.startswith(fam):
            return fam
    return None


def _directional_checks(a: Netlist, b: Netlist, ma, mb):
    """Expected orderings for the reference RTL/CMOS adder and MUX pairs."""
    fam = _family(a.name)
    if fam is None or fam != _family(b.name) or {a.technology, b.technology} != {"RTL", "CMOS"}:
        return ()
    rtl, cmos = (ma, mb) if a.technology == "RTL" else (mb, ma)
    if fam == "mux":
        return (("mux: RTL area < CMOS area", rtl["area_um2"] < cmos["area_um2"]),)
    return (("adder: CMOS area < RTL area", cmos["area_um2"] < rtl["area_um2"]),
            ("adder: CMOS power < RTL power", cmos["power_w"] < rtl["power_w"]))


def compare_report(a: Netlist, b: Netlist, area_model: AreaModel = DEFAULT_AREA,
                   delays: DelayModel = DEFAULT_DELAYS,
                   power_model: PowerModel = DEFAULT_POWER, activity: float = 1.0) -> Report:
    ma = netlist_metrics(a, area_model, delays, power_model, activity)
    mb = netlist_metrics(b, area_model, delays, power_model, activity)
    deltas = {k: mb[k] - ma[k] for k in METRICS}
    return Report(a.name + "/" + a.technology, b.name + "/" + b.technology, ma, mb, deltas,
                  _directional_checks(a, b, ma, mb))
