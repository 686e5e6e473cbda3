"""Gate-level netlists shared by the resistive (RTL) and CMOS technologies.

Text format, one statement per line::

    name adder1
    tech rtl
    input a0 b0 cin
    output s0 cout
    gate g0 NOT in=a0 out=na0
    gate g1 AND in=a0,b0 out=t0 delay=4.5e-07

``#`` starts a comment. The nets ``const0`` and ``const1`` are always driven
and may be used anywhere a net is expected.
"""

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import ArgumentError, NetlistError, ParseError
from .kernels import OPCODES

KINDS = ("NAND", "NOR", "AND", "OR", "NOT")
TECHNOLOGIES = ("RTL", "CMOS")
CONST_NETS = ("const0", "const1")
IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    inputs: Tuple[str, ...]
    output: str
    delay: Optional[float] = None

    @property
    def fan_in(self):
        return len(self.inputs)


@dataclass(frozen=True)
class CompiledNetlist:
    """Index arrays for the batch evaluator. Net rows: inputs, constants, gate outputs."""

    net_index: Dict[str, int]
    ops: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    out_idx: np.ndarray
    input_rows: np.ndarray
    output_rows: np.ndarray


@dataclass(frozen=True)
class Netlist:
    name: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    gates: Tuple[Gate, ...]
    technology: str = "RTL"
    _order: tuple = field(init=False, compare=False, repr=False)
    _compiled: list = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "technology", self.technology.upper())
        object.__setattr__(self, "_order", _validate(self.name, self.inputs, self.outputs,
                                                     self.gates, self.technology))
        object.__setattr__(self, "_compiled", [])

    @property
    def topo_order(self) -> Tuple[Gate, ...]:
        return self._order

    def driver_map(self) -> Dict[str, Gate]:
        return {g.output: g for g in self.gates}

    def fanout_map(self):
        fo = defaultdict(list)
        for i, g in enumerate(self.gates):
            for net in set(g.inputs):
                fo[net].append(i)
        return fo

    def nets(self):
        out = list(self.inputs)
        out += [g.output for g in self.gates]
        return out

    def with_technology(self, technology: str) -> "Netlist":
        return replace(self, technology=technology)

    def check_fanin(self, cap: int):
        for g in self.gates:
            if g.fan_in > cap:
                raise NetlistError(f"gate {g.id} has fan-in {g.fan_in} above cap {cap}")

    def compiled(self) -> CompiledNetlist:
        if not self._compiled:
            self._compiled.append(_compile(self))
        return self._compiled[0]


def _validate(name, inputs, outputs, gates, technology, lines: Optional[dict] = None):
    """Check netlist invariants and return the gates in topological order."""
    lines = lines or {}

    def fail(msg, key=None):
        raise NetlistError(msg, line=lines.get(key))

    if not IDENT.match(name):
        fail(f"bad netlist name {name!r}", ("name",))
    if technology not in TECHNOLOGIES:
        fail(f"unknown technology {technology!r}", ("tech",))

    driver = {c: "<const>" for c in CONST_NETS}
    for net in inputs:
        if not IDENT.match(net):
            fail(f"bad net name {net!r}", ("input", net))
        if net in driver:
            fail(f"net {net!r} driven twice", ("input", net))
        driver[net] = "<input>"
    ids = set()
    for g in gates:
        key = ("gate", g.id)
        if not IDENT.match(g.id):
            fail(f"bad gate id {g.id!r}", key)
        if g.id in ids:
            fail(f"duplicate gate id {g.id!r}", key)
        ids.add(g.id)
        if g.kind not in KINDS:
            fail(f"unknown gate kind {g.kind!r}", key)
        if g.fan_in < 1:
            fail(f"gate {g.id} has no inputs", key)
        if g.kind == "NOT" and g.fan_in != 1:
            fail(f"NOT gate {g.id} must have exactly one input", key)
        for net in g.inputs + (g.output,):
            if not IDENT.match(net):
                fail(f"bad net name {net!r} on gate {g.id}", key)
        if g.output in driver:
            fail(f"net {g.output!r} driven twice", key)
        driver[g.output] = g.id
    for g in gates:
        for net in g.inputs:
            if net not in driver:
                fail(f"undriven net {net!r} at gate {g.id}", ("gate", g.id))
    for net in outputs:
        if net not in driver:
            fail(f"output net {net!r} is not driven", ("output", net))

    # Kahn's algorithm; deterministic by declaration order
    by_out = {g.output: i for i, g in enumerate(gates)}
    indeg = [sum(1 for net in set(g.inputs) if net in by_out) for g in gates]
    users = defaultdict(list)
    for i, g in enumerate(gates):
        for net in set(g.inputs):
            if net in by_out:
                users[by_out[net]].append(i)
    ready = [i for i, d in enumerate(indeg) if d == 0]
    order = []
    head = 0
    while head < len(ready):
        i = ready[head]
        head += 1
        order.append(i)
        for j in users[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    if len(order) != len(gates):
        stuck = next(g for i, g in enumerate(gates) if indeg[i] > 0)
        fail(f"combinational cycle through gate {stuck.id}", ("gate", stuck.id))
    return tuple(gates[i] for i in order)


def _compile(n: Netlist) -> CompiledNetlist:
    index = {}
    for net in n.inputs:
        index[net] = len(index)
    for c in CONST_NETS:
        index[c] = len(index)
    for g in n.topo_order:
        index[g.output] = len(index)
    order = n.topo_order
    ops = np.array([OPCODES[g.kind] for g in order], dtype=np.int64)
    ptr = np.zeros(len(order) + 1, dtype=np.int64)
    flat = []
    for i, g in enumerate(order):
        flat.extend(index[x] for x in g.inputs)
        ptr[i + 1] = len(flat)
    return CompiledNetlist(
        net_index=index,
        ops=ops,
        in_ptr=ptr,
        in_idx=np.array(flat, dtype=np.int64),
        out_idx=np.array([index[g.output] for g in order], dtype=np.int64),
        input_rows=np.array([index[x] for x in n.inputs], dtype=np.int64),
        output_rows=np.array([index[x] for x in n.outputs], dtype=np.int64),
    )


# ------------------------------------------------------------ text format ---

def parse_netlist(text: str) -> Netlist:
    name = None
    tech = "RTL"
    inputs, outputs, gates = [], [], []
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "name":
            if len(rest) != 1:
                raise ParseError("'name' takes one identifier", line=lineno)
            name = rest[0]
            lines[("name",)] = lineno
        elif head == "tech":
            if len(rest) != 1 or rest[0].upper() not in TECHNOLOGIES:
                raise ParseError("'tech' must be rtl or cmos", line=lineno)
            tech = rest[0].upper()
            lines[("tech",)] = lineno
        elif head in ("input", "output"):
            if not rest:
                raise ParseError(f"'{head}' needs at least one net", line=lineno)
            (inputs if head == "input" else outputs).extend(rest)
            for net in rest:
                lines.setdefault((head, net), lineno)
        elif head == "gate":
            gates.append(_parse_gate(rest, lineno))
            lines.setdefault(("gate", gates[-1].id), lineno)
        else:
            raise ParseError(f"unknown statement {head!r}", line=lineno)
    if name is None:
        raise ParseError("missing 'name' statement", line=1)
    _validate(name, inputs, outputs, gates, tech, lines)
    return Netlist(name, tuple(inputs), tuple(outputs), tuple(gates), tech)


def _parse_gate(tokens, lineno) -> Gate:
    if len(tokens) < 4:
        raise ParseError("gate needs: <id> <KIND> in=<nets> out=<net>", line=lineno)
    gid, kind, *attrs = tokens
    kind = kind.upper()
    if kind not in KINDS:
        raise ParseError(f"unknown gate kind {tokens[1]!r}", line=lineno)
    kv = {}
    for a in attrs:
        if "=" not in a:
            raise ParseError(f"expected key=value, got {a!r}", line=lineno)
        k, v = a.split("=", 1)
        if k not in ("in", "out", "delay") or k in kv:
            raise ParseError(f"bad gate attribute {k!r}", line=lineno)
        kv[k] = v
    if "in" not in kv or "out" not in kv:
        raise ParseError("gate needs in= and out=", line=lineno)
    delay = None
    if "delay" in kv:
        try:
            delay = float(kv["delay"])
        except ValueError:
            raise ParseError(f"bad delay {kv['delay']!r}", line=lineno) from None
    ins = tuple(x for x in kv["in"].split(",") if x)
    return Gate(gid, kind, ins, kv["out"], delay)


def emit_netlist(n: Netlist) -> str:
    out = [f"name {n.name}", f"tech {n.technology.lower()}"]
    if n.inputs:
        out.append("input " + " ".join(n.inputs))
    if n.outputs:
        out.append("output " + " ".join(n.outputs))
    for g in n.gates:
        s = f"gate {g.id} {g.kind} in={','.join(g.inputs)} out={g.output}"
        if g.delay is not None:
            s += f" delay={g.delay!r}"
        out.append(s)
    return "\n".join(out) + "\n"


# ------------------------------------------------------------- generators ---

def gen_ripple_adder(bits: int, technology: str = "RTL") -> Netlist:
    """Ripple-carry adder from per-bit sum-of-products full adders.

    Each bit uses 3 NOT, 4 AND3 + OR4 for the sum and 3 AND2 + OR3 for the
    carry.
    """
    if int(bits) != bits or bits < 1:
        raise ArgumentError(f"bits must be a positive integer, got {bits}")
    inputs = [f"a{i}" for i in range(bits)] + [f"b{i}" for i in range(bits)] + ["cin"]
    outputs = [f"s{i}" for i in range(bits)] + ["cout"]
    gates = []
    carry = "cin"
    for i in range(bits):
        a, b, c = f"a{i}", f"b{i}", carry
        na, nb, nc = f"na{i}", f"nb{i}", f"nc{i}"
        p = f"u{i}_"
        gates += [Gate(p + "na", "NOT", (a,), na), Gate(p + "nb", "NOT", (b,), nb),
                  Gate(p + "nc", "NOT", (c,), nc)]
        terms = [(na, nb, c), (na, b, nc), (a, nb, nc), (a, b, c)]
        for j, t in enumerate(terms):
            gates.append(Gate(f"{p}m{j}", "AND", t, f"m{i}_{j}"))
        gates.append(Gate(p + "sum", "OR", tuple(f"m{i}_{j}" for j in range(4)), f"s{i}"))
        pairs = [(a, b), (b, c), (a, c)]
        for j, t in enumerate(pairs):
            gates.append(Gate(f"{p}g{j}", "AND", t, f"g{i}_{j}"))
        cout = "cout" if i == bits - 1 else f"c{i + 1}"
        gates.append(Gate(p + "carry", "OR", tuple(f"g{i}_{j}" for j in range(3)), cout))
        carry = cout
    return Netlist(f"adder{bits}", tuple(inputs), tuple(outputs), tuple(gates), technology)


def gen_mux(n_data: int, technology: str = "RTL") -> Netlist:
    """n_data-to-1 multiplexer: one AND per data line, one wide OR."""
    if int(n_data) != n_data or n_data < 2 or n_data & (n_data - 1):
        raise ArgumentError(f"n_data must be a power of two >= 2, got {n_data}")
    k = n_data.bit_length() - 1
    sel = [f"s{j}" for j in range(k)]
    data = [f"d{i}" for i in range(n_data)]
    gates = [Gate(f"inv_s{j}", "NOT", (sel[j],), f"ns{j}") for j in range(k)]
    for i in range(n_data):
        lits = tuple(sel[j] if (i >> j) & 1 else f"ns{j}" for j in range(k))
        gates.append(Gate(f"sel{i}", "AND", (data[i],) + lits, f"p{i}"))
    gates.append(Gate("or_out", "OR", tuple(f"p{i}" for i in range(n_data)), "y"))
    return Netlist(f"mux{n_data}", tuple(sel + data), ("y",), tuple(gates), technology)


def decompose_fanin(n: Netlist, cap: int) -> Netlist:
    """Replace every gate wider than ``cap`` by a balanced tree of capped gates.

    AND/OR trees keep their kind. NAND/NOR become an AND/OR tree under a
    final NAND/NOR. Each layer splits into ceil(width / cap) near-equal
    groups, which gives the minimum depth ceil(log_cap(width)).
    """
    if int(cap) != cap or cap < 2:
        raise ArgumentError(f"fan-in cap must be >= 2, got {cap}")
    taken = set(n.inputs) | set(CONST_NETS) | {g.output for g in n.gates}
    ids = {g.id for g in n.gates}

    def fresh(base, pool):
        j = 0
        while f"{base}_d{j}" in pool:
            j += 1
        pool.add(f"{base}_d{j}")
        return f"{base}_d{j}"

    new_gates = []
    for g in n.gates:
        if g.fan_in <= cap or g.kind == "NOT":
            new_gates.append(g)
            continue
        leaf = {"NAND": "AND", "NOR": "OR"}.get(g.kind, g.kind)
        nets = list(g.inputs)
        while len(nets) > cap:
            groups = math.ceil(len(nets) / cap)
            size, extra = divmod(len(nets), groups)
            layer, pos = [], 0
            for j in range(groups):
                chunk = nets[pos:pos + size + (1 if j < extra else 0)]
                pos += len(chunk)
                if len(chunk) == 1:
                    layer.append(chunk[0])
                    continue
                out = fresh(g.output, taken)
                new_gates.append(Gate(fresh(g.id, ids), leaf, tuple(chunk), out))
                layer.append(out)
            nets = layer
        new_gates.append(Gate(g.id, g.kind, tuple(nets), g.output, g.delay))
    return Netlist(n.name, n.inputs, n.outputs, tuple(new_gates), n.technology)


# ------------------------------------------------------------ accounting ----

@dataclass(frozen=True)
class AreaModel:
    """Per-component areas in um^2 and the RTL threshold-device choice.

    The defaults are a least-squares fit of the resistive/CMOS adder and MUX
    areas reported for a 0.25 um process; only the RTL-vs-CMOS ordering they
    produce is meaningful.
    """

    transistor_area: float = 4.1e-3
    memristor_area: float = 1.15e-3
    opamp_transistors: int = 8
    threshold_device: str = "opamp"


@dataclass(frozen=True)
class ComponentStats:
    gate_counts: Dict[Tuple[str, int], int]
    memristor_count: int
    transistor_count: int
    opamp_count: int
    area: float

    @property
    def gate_total(self):
        return sum(self.gate_counts.values())

    def __add__(self, other: "ComponentStats") -> "ComponentStats":
        counts = Counter(self.gate_counts)
        counts.update(other.gate_counts)
        return ComponentStats(dict(counts), self.memristor_count + other.memristor_count,
                              self.transistor_count + other.transistor_count,
                              self.opamp_count + other.opamp_count, self.area + other.area)


DEFAULT_AREA = AreaModel()

_RTL_INVERTER_STAGES = {"NAND": 3, "AND": 2, "NOR": 1, "OR": 2, "NOT": 1}


def component_stats(n: Netlist, area_model: AreaModel = DEFAULT_AREA) -> ComponentStats:
    counts = Counter((g.kind, g.fan_in) for g in n.gates)
    memristors = transistors = opamps = 0
    for g in n.gates:
        if n.technology == "RTL":
            memristors += g.fan_in + 1
            if area_model.threshold_device == "opamp":
                opamps += 1
                transistors += area_model.opamp_transistors
                if g.kind in ("NAND", "NOR", "NOT"):
                    transistors += 2
            else:
                transistors += 2 * _RTL_INVERTER_STAGES[g.kind]
        else:
            if g.kind == "NOT":
                transistors += 2
            elif g.kind in ("NAND", "NOR"):
                transistors += 2 * g.fan_in
            else:
                transistors += 2 * g.fan_in + 2
    area = transistors * area_model.transistor_area + memristors * area_model.memristor_area
    return ComponentStats(dict(counts), memristors, transistors, opamps, area)


def inventory(n: Netlist) -> Dict[Tuple[str, int], int]:
    """Gate counts keyed by (kind, fan_in)."""
    return dict(Counter((g.kind, g.fan_in) for g in n.gates))
