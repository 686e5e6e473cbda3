"""Device parameter profiles in a flat ``key = value`` text format.

Example::

    # tsmc025-like defaults
    v_high = 1.0
    device = opamp
    stage_vdd_fractions = 0.25, 0.5, 1.0

Keys are the field names of :class:`DeviceProfile`, which in turn reuse the
field names of :class:`~rtlkit.threshold.InverterParams` and
:class:`~rtlkit.threshold.MosfetBiasParams`.
"""

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .analog import R_OFF, DividerConfig
from .errors import ArgumentError, ParseError
from .threshold import InverterParams, MosfetBiasParams

DEVICES = ("inverter", "opamp")


def parse_kv(text: str) -> dict:
    """Parse ``key = value`` lines into ``{key: (raw_value, line_number)}``.

    ``#`` starts a comment. Duplicate keys are an error.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key.isidentifier():
            raise ParseError(f"bad key {key!r}", line=lineno)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", line=lineno)
        out[key] = (value, lineno)
    return out


def format_kv(items: dict, header: Optional[str] = None) -> str:
    lines = [f"# {header}"] if header else []
    for k, v in items.items():
        if v is None:
            continue
        if isinstance(v, (tuple, list)):
            v = ", ".join(_fmt(x) for x in v)
        else:
            v = _fmt(v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _convert(kind, raw, key, lineno):
    try:
        if kind in ("float", float):
            return float(raw)
        if kind in ("int", int):
            return int(raw)
        if kind in ("Optional[float]",):
            return None if raw.lower() in ("", "none") else float(raw)
        if kind in ("Tuple[float, ...]",):
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError:
        raise ParseError(f"bad value for {key}: {raw!r}", line=lineno) from None


@dataclass(frozen=True)
class DeviceProfile:
    name: str = "tsmc025-like"
    v_high: float = 1.0
    v_low: float = 0.0
    r_input: float = R_OFF
    device: str = "inverter"
    # multi-V_DD chain rails as fractions of v_dd, first stage first
    stage_vdd_fractions: Tuple[float, ...] = (0.25, 0.5, 1.0)
    delta_frac: float = 0.25
    delta_min: float = 1e-3
    # inverter
    v_tn: float = 0.4
    v_tp: float = -0.4
    mu_p_w_p: float = 1.0
    mu_n_w_n: float = 1.0
    v_dd: float = 1.0
    # body bias
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
        if self.device not in DEVICES:
            raise ArgumentError(f"device must be one of {DEVICES}, got {self.device!r}")
        if not 1 <= len(self.stage_vdd_fractions) <= 3:
            raise ArgumentError("stage_vdd_fractions needs 1 to 3 entries")
        if not self.v_low < self.v_high:
            raise ArgumentError("need v_low < v_high")

    @property
    def stage_vdds(self):
        return tuple(f * self.v_dd for f in self.stage_vdd_fractions)

    def inverter(self) -> InverterParams:
        return InverterParams(self.v_tn, self.v_tp, self.mu_p_w_p, self.mu_n_w_n, self.v_dd)

    def bias(self) -> MosfetBiasParams:
        return MosfetBiasParams(self.v_tn0, self.v_bs, self.v_bm, self.v_bx, self.n_a, self.n_i,
                                self.temp, self.gamma1, self.gamma2, self.c_narrow, self.phi_s)

    def divider(self, n, m) -> DividerConfig:
        return DividerConfig(n=n, r_input=self.r_input, m=m, v_high=self.v_high, v_low=self.v_low)

    def with_(self, **changes) -> "DeviceProfile":
        return dataclasses.replace(self, **changes)

    # -- text format --

    def to_text(self) -> str:
        return format_kv(dataclasses.asdict(self), header=f"device profile {self.name}")

    @classmethod
    def from_text(cls, text: str) -> "DeviceProfile":
        raw = parse_kv(text)
        kinds = {f.name: _field_kind(f) for f in dataclasses.fields(cls)}
        kw = {}
        for key, (value, lineno) in raw.items():
            if key not in kinds:
                raise ParseError(f"unknown profile key {key!r}", line=lineno)
            kw[key] = _convert(kinds[key], value, key, lineno)
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "DeviceProfile":
        return cls.from_text(Path(path).read_text())


def _field_kind(f):
    if f.type == Optional[float]:
        return "Optional[float]"
    if f.type == Tuple[float, ...]:
        return "Tuple[float, ...]"
    return f.type


TSMC025_LIKE = DeviceProfile()
OPAMP_PROFILE = DeviceProfile(name="tsmc025-like-opamp", device="opamp")
