"""Event-driven gate simulation with transport delays, plus zero-delay evaluation.

Edges are ideal (zero rise/fall time). All events sharing a timestamp are
applied together before any gate is re-evaluated, and gates are evaluated
in declaration order, so runs are reproducible.
"""

import csv
import heapq
import io
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .delays import DEFAULT_DELAYS, DelayModel
from .errors import ArgumentError, ParseError
from .kernels import eval_gates
from .netlist import CONST_NETS, Gate, Netlist


def gate_value(kind: str, levels) -> int:
    if kind == "AND":
        return int(all(levels))
    if kind == "NAND":
        return int(not all(levels))
    if kind == "OR":
        return int(any(levels))
    if kind == "NOR":
        return int(not any(levels))
    return int(not levels[0])


def _input_dict(n: Netlist, input_levels) -> Dict[str, int]:
    if isinstance(input_levels, dict):
        missing = [x for x in n.inputs if x not in input_levels]
        if missing:
            raise ArgumentError(f"no level for inputs {missing}")
        return {x: int(bool(input_levels[x])) for x in n.inputs}
    if len(input_levels) != len(n.inputs):
        raise ArgumentError(f"expected {len(n.inputs)} input levels, got {len(input_levels)}")
    return {x: int(bool(v)) for x, v in zip(n.inputs, input_levels)}


def net_levels(n: Netlist, input_levels) -> Dict[str, int]:
    """Zero-delay level of every net."""
    vals = _input_dict(n, input_levels)
    vals["const0"], vals["const1"] = 0, 1
    for g in n.topo_order:
        vals[g.output] = gate_value(g.kind, [vals[x] for x in g.inputs])
    return vals


def steady_state(n: Netlist, input_levels) -> Tuple[int, ...]:
    """Output levels in ``n.outputs`` order after all gates settle."""
    vals = net_levels(n, input_levels)
    return tuple(vals[o] for o in n.outputs)


def evaluate_batch(n: Netlist, inputs, all_nets: bool = False) -> np.ndarray:
    """Zero-delay evaluation of many input vectors at once.

    ``inputs`` is (B, len(n.inputs)) of 0/1. Returns (B, len(n.outputs)), or
    the full (nets, B) level matrix indexed by ``n.compiled().net_index``
    when ``all_nets`` is set.
    """
    c = n.compiled()
    x = np.asarray(inputs, dtype=np.uint8)
    if x.ndim != 2 or x.shape[1] != len(n.inputs):
        raise ArgumentError(f"inputs must be (B, {len(n.inputs)}), got {x.shape}")
    values = np.zeros((len(c.net_index), x.shape[0]), dtype=np.uint8)
    values[c.input_rows] = x.T
    values[c.net_index["const1"]] = 1
    eval_gates(c.ops, c.in_ptr, c.in_idx, c.out_idx, values)
    if all_nets:
        return values
    return values[c.output_rows].T.copy()


# -------------------------------------------------------------- stimulus ----

@dataclass(frozen=True)
class Stimulus:
    """Input edges as (time_s, net, level). Events at t = 0 set initial levels."""

    events: Tuple[Tuple[float, str, int], ...]

    def __post_init__(self):
        last = {}
        clean = []
        for t, net, level in self.events:
            t = float(t)
            if t < 0:
                raise ArgumentError(f"negative stimulus time {t} on {net}")
            if net in last and t < last[net]:
                raise ArgumentError(f"stimulus times for {net} decrease at {t}")
            if level not in (0, 1, True, False):
                raise ArgumentError(f"level must be 0 or 1, got {level!r}")
            last[net] = t
            clean.append((t, net, int(level)))
        clean.sort(key=lambda e: e[0])
        object.__setattr__(self, "events", tuple(clean))

    @property
    def last_time(self) -> float:
        return max((t for t, _, _ in self.events), default=0.0)

    def initial_levels(self) -> Dict[str, int]:
        return {net: lvl for t, net, lvl in self.events if t == 0}

    @classmethod
    def from_levels(cls, n: Netlist, levels, t=0.0):
        d = _input_dict(n, levels)
        return cls(tuple((t, k, v) for k, v in d.items()))

    def then(self, t: float, levels: Dict[str, int]) -> "Stimulus":
        return Stimulus(self.events + tuple((t, k, int(v)) for k, v in levels.items()))

    @classmethod
    def from_csv(cls, text: str) -> "Stimulus":
        events = []
        reader = csv.reader(io.StringIO(text))
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            if lineno == 1 and row[0].strip() == "time_us":
                continue
            if len(row) != 3:
                raise ParseError("expected time_us,net,level", line=lineno)
            try:
                t = float(row[0]) * 1e-6
                level = int(row[2])
            except ValueError:
                raise ParseError(f"bad stimulus row {','.join(row)!r}", line=lineno) from None
            events.append((t, row[1].strip(), level))
        try:
            return cls(tuple(events))
        except ArgumentError as e:
            raise ParseError(str(e)) from None

    def to_csv(self) -> str:
        lines = ["time_us,net,level"]
        lines += [f"{_us(t)},{net},{lvl}" for t, net, lvl in self.events]
        return "\n".join(lines) + "\n"


def square_wave(net: str, start: float, on_time: float, t_end: float, initial: int = 0):
    """Events for a 50% duty square wave rising at ``start``, high for ``on_time``."""
    ev = [(0.0, net, initial)]
    t, level = start, 1 - initial
    while t <= t_end:
        ev.append((t, net, level))
        t += on_time
        level = 1 - level
    return ev


def _us(t):
    return f"{t * 1e6:.6f}"


# -------------------------------------------------------------- waveform ----

@dataclass
class Waveform:
    changes: Dict[str, List[Tuple[float, int]]]
    t_end: float
    net_order: List[str] = field(default_factory=list)

    def value_at(self, net: str, t: float) -> int:
        val = None
        for tc, lvl in self.changes[net]:
            if tc > t:
                break
            val = lvl
        return val

    def final_levels(self, nets: Optional[Sequence[str]] = None) -> Tuple[int, ...]:
        nets = nets if nets is not None else self.net_order
        return tuple(self.changes[x][-1][1] for x in nets)

    def last_change(self, nets: Optional[Sequence[str]] = None) -> float:
        nets = nets if nets is not None else self.net_order
        return max(self.changes[x][-1][0] for x in nets)

    def to_csv(self) -> str:
        rank = {net: i for i, net in enumerate(self.net_order)}
        rows = [(t, rank[net], net, lvl) for net, ch in self.changes.items() for t, lvl in ch]
        rows.sort()
        lines = ["time_us,net,level"]
        lines += [f"{_us(t)},{net},{lvl}" for t, _, net, lvl in rows]
        return "\n".join(lines) + "\n"


def gate_delay(g: Gate, technology: str, delays: DelayModel) -> float:
    if g.delay is not None:
        return g.delay
    return delays.delay(g.kind, g.fan_in, technology)


def simulate(n: Netlist, s: Stimulus, t_end: float, delays: DelayModel = DEFAULT_DELAYS) -> Waveform:
    if t_end < 0:
        raise ArgumentError(f"t_end must be >= 0, got {t_end}")
    pis = set(n.inputs)
    for _, net, _ in s.events:
        if net not in pis:
            raise ArgumentError(f"stimulus drives {net!r}, which is not a primary input")
    init = s.initial_levels()
    missing = [x for x in n.inputs if x not in init]
    if missing:
        raise ArgumentError(f"uninitialized inputs at t=0: {missing}")

    values = net_levels(n, init)
    order = list(n.inputs) + [g.output for g in n.gates]
    changes = {net: [(0.0, values[net])] for net in order}
    for c in CONST_NETS:
        values.setdefault(c, int(c == "const1"))
    projected = dict(values)
    fanout = n.fanout_map()
    d = [gate_delay(g, n.technology, delays) for g in n.gates]

    heap = []
    seq = 0
    for t, net, lvl in s.events:
        if t > 0:
            heapq.heappush(heap, (t, seq, net, lvl))
            seq += 1
            projected[net] = lvl

    while heap and heap[0][0] <= t_end:
        t = heap[0][0]
        batch = {}
        while heap and heap[0][0] == t:
            _, _, net, lvl = heapq.heappop(heap)
            batch[net] = lvl
        touched = set()
        for net, lvl in batch.items():
            if values[net] != lvl:
                values[net] = lvl
                changes[net].append((t, lvl))
                touched.update(fanout.get(net, ()))
        for gi in sorted(touched):
            g = n.gates[gi]
            new = gate_value(g.kind, [values[x] for x in g.inputs])
            if new != projected[g.output]:
                heapq.heappush(heap, (t + d[gi], seq, g.output, new))
                seq += 1
                projected[g.output] = new
    return Waveform(changes, t_end, order)


# --------------------------------------------------------- critical path ----

@dataclass(frozen=True)
class CriticalPath:
    path: Tuple[str, ...]
    delay: float


def critical_path(n: Netlist, delays: DelayModel = DEFAULT_DELAYS) -> CriticalPath:
    """Longest delay-weighted path from any primary input to any primary output."""
    arrival = {x: 0.0 for x in n.inputs}
    for c in CONST_NETS:
        arrival[c] = 0.0
    via = {}
    for g in n.topo_order:
        src = max(g.inputs, key=lambda x: arrival[x])
        arrival[g.output] = arrival[src] + gate_delay(g, n.technology, delays)
        via[g.output] = (g, src)
    if not n.outputs:
        return CriticalPath((), 0.0)
    end = max(n.outputs, key=lambda x: arrival[x])
    path = []
    net = end
    while net in via:
        g, net = via[net]
        path.append(g.id)
    return CriticalPath(tuple(reversed(path)), arrival[end])
