"""Boolean expressions and truth tables compiled to two-level netlists.

Expression grammar, loosest binding first::

    expr   := xor ('|' xor)*
    xor    := term ('^' term)*
    term   := factor ('&' factor)*
    factor := '!' factor | '(' expr ')' | ident | '0' | '1'

Truth tables list rows in binary counting order with the first variable as
the most significant bit.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError, CapacityError, ParseError, RTLError
from .netlist import Gate, Netlist, decompose_fanin

MAX_TABLE_VARS = 24
MAX_QM_VARS = 16


# ---------------------------------------------------------------- AST -------

@dataclass(frozen=True)
class Var:
    name: str
    line: int = 1
    column: int = 1

    def eval(self, env):
        return env[self.name]


@dataclass(frozen=True)
class Const:
    value: int
    line: int = 1
    column: int = 1

    def eval(self, env):
        return self.value


@dataclass(frozen=True)
class Not:
    arg: object
    line: int = 1
    column: int = 1

    def eval(self, env):
        return 1 - self.arg.eval(env)


@dataclass(frozen=True)
class BinOp:
    op: str  # '&', '^' or '|'
    left: object
    right: object
    line: int = 1
    column: int = 1

    def eval(self, env):
        a, b = self.left.eval(env), self.right.eval(env)
        if self.op == "&":
            return a & b
        if self.op == "|":
            return a | b
        return a ^ b


@dataclass(frozen=True)
class BoolExpr:
    root: object
    variables: Tuple[str, ...]
    source: str = field(default="", compare=False)

    def evaluate(self, assignment) -> int:
        """Evaluate on a mapping ``{var: 0/1}`` or a sequence in ``variables`` order."""
        if not isinstance(assignment, dict):
            if len(assignment) != len(self.variables):
                raise ArgumentError(f"expected {len(self.variables)} values, got {len(assignment)}")
            assignment = dict(zip(self.variables, assignment))
        missing = [v for v in self.variables if v not in assignment]
        if missing:
            raise ArgumentError(f"no value for {', '.join(missing)}")
        return int(self.root.eval({k: int(bool(v)) for k, v in assignment.items()}))


def _tokenize(text):
    toks = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        if ch in "!&|^()":
            toks.append((ch, ch, line, col))
            col, i = col + 1, i + 1
            continue
        if ch.isalpha() or ch == "_" or ch.isdigit():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in ("0", "1"):
                toks.append(("const", word, line, col))
            elif word[0].isdigit():
                raise ParseError(f"bad identifier {word!r}", line, col)
            else:
                toks.append(("ident", word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0
        self.order = []

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2], tok[3])
        self.pos += 1
        return tok

    def binary(self, op, sub):
        node = sub()
        while self.peek()[0] == op:
            _, _, ln, cl = self.take()
            node = BinOp(op, node, sub(), ln, cl)
        return node

    def expr(self):
        return self.binary("|", self.xor)

    def xor(self):
        return self.binary("^", self.term)

    def term(self):
        return self.binary("&", self.factor)

    def factor(self):
        kind, val, ln, cl = self.peek()
        if kind == "!":
            self.take()
            return Not(self.factor(), ln, cl)
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if kind == "ident":
            self.take()
            if val not in self.order:
                self.order.append(val)
            return Var(val, ln, cl)
        if kind == "const":
            self.take()
            return Const(int(val), ln, cl)
        what = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"unexpected {what}", ln, cl)


def parse_expr(text: str) -> BoolExpr:
    p = _Parser(text)
    root = p.expr()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
    if len(p.order) > MAX_TABLE_VARS:
        raise CapacityError(f"{len(p.order)} variables exceed the limit of {MAX_TABLE_VARS}")
    return BoolExpr(root, tuple(p.order), text)


# ---------------------------------------------------------- truth tables ----

@dataclass(frozen=True)
class TruthTable:
    variables: Tuple[str, ...]
    outputs: np.ndarray
    dont_care: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.variables)
        if n > MAX_TABLE_VARS:
            raise CapacityError(f"{n} variables exceed the limit of {MAX_TABLE_VARS}")
        if len(set(self.variables)) != n:
            raise ArgumentError("duplicate variable names")
        out = np.asarray(self.outputs, dtype=np.uint8)
        if out.shape != (1 << n,):
            raise ArgumentError(f"truth table over {n} variables needs {1 << n} rows, got {out.shape}")
        dc = np.zeros(1 << n, dtype=bool) if self.dont_care is None else np.asarray(self.dont_care, dtype=bool)
        if dc.shape != out.shape:
            raise ArgumentError("dont_care mask has the wrong shape")
        object.__setattr__(self, "outputs", np.where(dc, 0, out).astype(np.uint8))
        object.__setattr__(self, "dont_care", dc)

    @property
    def n(self):
        return len(self.variables)

    def on_set(self):
        return np.flatnonzero((self.outputs == 1) & ~self.dont_care)

    def dc_set(self):
        return np.flatnonzero(self.dont_care)

    def __eq__(self, other):
        return (isinstance(other, TruthTable) and self.variables == other.variables
                and np.array_equal(self.outputs, other.outputs)
                and np.array_equal(self.dont_care, other.dont_care))

    @classmethod
    def from_minterms(cls, variables, ones, dont_cares=()):
        if isinstance(variables, int):
            variables = tuple(f"x{i}" for i in range(variables))
        size = 1 << len(variables)
        out = np.zeros(size, dtype=np.uint8)
        dc = np.zeros(size, dtype=bool)
        out[list(ones)] = 1
        dc[list(dont_cares)] = True
        return cls(tuple(variables), out, dc)


def input_columns(n: int) -> np.ndarray:
    """(2**n, n) matrix of input bits in row order, first column most significant."""
    rows = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((rows[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def to_truth_table(e: BoolExpr, variables: Optional[Sequence[str]] = None) -> TruthTable:
    variables = tuple(variables) if variables is not None else e.variables
    missing = set(e.variables) - set(variables)
    if missing:
        raise ArgumentError(f"variables {sorted(missing)} not in the requested order")
    if len(variables) > MAX_TABLE_VARS:
        raise CapacityError(f"{len(variables)} variables exceed the limit of {MAX_TABLE_VARS}")
    cols = input_columns(len(variables))
    env = {v: cols[:, i] for i, v in enumerate(variables)}
    out = e.root.eval(env)
    out = np.broadcast_to(np.asarray(out, dtype=np.uint8), (1 << len(variables),)).copy()
    return TruthTable(variables, out)


def parse_truth_table(text: str) -> TruthTable:
    """Header of variable names, then ``<bits> <0|1|->`` rows; unlisted rows are 0."""
    variables = None
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if variables is None:
            for v in parts:
                if not (v[0].isalpha() or v[0] == "_") or not v.replace("_", "").isalnum():
                    raise ParseError(f"bad variable name {v!r}", line=lineno)
            variables = tuple(parts)
            if len(variables) > MAX_TABLE_VARS:
                raise CapacityError(f"{len(variables)} variables exceed the limit of {MAX_TABLE_VARS}")
            continue
        if len(parts) != 2:
            raise ParseError("row must be '<bits> <0|1|->'", line=lineno)
        bits, val = parts
        if len(bits) != len(variables) or set(bits) - {"0", "1"}:
            raise ParseError(f"row needs {len(variables)} binary digits, got {bits!r}", line=lineno)
        if val not in ("0", "1", "-"):
            raise ParseError(f"output must be 0, 1 or -, got {val!r}", line=lineno)
        idx = int(bits, 2)
        if idx in rows:
            raise ParseError(f"row {bits} listed twice", line=lineno)
        rows[idx] = val
    if variables is None:
        raise ParseError("missing header line", line=1)
    size = 1 << len(variables)
    out = np.zeros(size, dtype=np.uint8)
    dc = np.zeros(size, dtype=bool)
    for idx, val in rows.items():
        if val == "-":
            dc[idx] = True
        else:
            out[idx] = int(val)
    return TruthTable(variables, out, dc)


def emit_truth_table(t: TruthTable, sparse: bool = True) -> str:
    lines = [" ".join(t.variables)]
    for idx in range(1 << t.n):
        if t.dont_care[idx]:
            val = "-"
        else:
            val = str(int(t.outputs[idx]))
            if sparse and val == "0":
                continue
        lines.append(f"{idx:0{t.n}b} {val}" if t.n else f" {val}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- covers ----

@dataclass(frozen=True)
class Cover:
    """Sum of implicants; each implicant is a string over '0', '1', '-' in variable order."""

    variables: Tuple[str, ...]
    implicants: Tuple[str, ...]

    def __post_init__(self):
        n = len(self.variables)
        for imp in self.implicants:
            if len(imp) != n or set(imp) - set("01-"):
                raise ArgumentError(f"bad implicant {imp!r} for {n} variables")

    def __len__(self):
        return len(self.implicants)

    def literal_count(self):
        return sum(len(imp) - imp.count("-") for imp in self.implicants)

    def evaluate_rows(self) -> np.ndarray:
        """Cover output for every truth-table row."""
        n = len(self.variables)
        cols = input_columns(n).astype(bool)
        out = np.zeros(1 << n, dtype=bool)
        for imp in self.implicants:
            term = np.ones(1 << n, dtype=bool)
            for i, ch in enumerate(imp):
                if ch == "1":
                    term &= cols[:, i]
                elif ch == "0":
                    term &= ~cols[:, i]
            out |= term
        return out.astype(np.uint8)


def canonical_sop(t: TruthTable) -> Cover:
    return Cover(t.variables, tuple(f"{m:0{t.n}b}" for m in t.on_set()))


def _pattern(value, mask, n):
    chars = []
    for i in range(n):
        bit = 1 << (n - 1 - i)
        chars.append("-" if mask & bit else ("1" if value & bit else "0"))
    return "".join(chars)


def prime_implicants(t: TruthTable):
    """All prime implicants as (value, mask) pairs; masked bits are zero in value."""
    n = t.n
    terms = {(int(m), 0) for m in np.concatenate([t.on_set(), t.dc_set()])}
    primes = set()
    while terms:
        merged = set()
        used = set()
        for v, mask in terms:
            for i in range(n):
                bit = 1 << i
                if mask & bit or v & bit:
                    continue
                if (v | bit, mask) in terms:
                    merged.add((v, mask | bit))
                    used.add((v, mask))
                    used.add((v | bit, mask))
        primes |= terms - used
        terms = merged
    return primes


def quine_mccluskey(t: TruthTable) -> Cover:
    """Minimized cover: essential primes first, then greedy largest-coverage selection.

    The result covers every on-set row, no off-set row, and is never larger
    than the canonical sum of products. It is not guaranteed minimum.
    """
    n = t.n
    if n > MAX_QM_VARS:
        raise CapacityError(f"Quine-McCluskey limited to {MAX_QM_VARS} variables, got {n}")
    on = {int(m) for m in t.on_set()}
    if not on:
        return Cover(t.variables, ())

    covers: Dict[Tuple[int, int], set] = {}
    for v, mask in prime_implicants(t):
        free = [1 << i for i in range(n) if mask & (1 << i)]
        mins = set()
        for k in range(1 << len(free)):
            m = v
            for j, b in enumerate(free):
                if k >> j & 1:
                    m |= b
            if m in on:
                mins.add(m)
        if mins:
            covers[(v, mask)] = mins

    by_minterm: Dict[int, list] = {m: [] for m in on}
    for p, mins in covers.items():
        for m in mins:
            by_minterm[m].append(p)

    chosen = []
    uncovered = set(on)
    for m in sorted(on):
        ps = by_minterm[m]
        if len(ps) == 1 and ps[0] not in chosen:
            chosen.append(ps[0])
    for p in chosen:
        uncovered -= covers[p]

    while uncovered:
        # most new minterms, then fewest literals, then lowest (value, mask)
        best = min(covers, key=lambda p: (-len(covers[p] & uncovered), -bin(p[1]).count("1"), p))
        chosen.append(best)
        uncovered -= covers[best]

    cover = Cover(t.variables, tuple(sorted(_pattern(v, mk, n) for v, mk in chosen)))
    got = cover.evaluate_rows()
    care = ~t.dont_care
    if not np.array_equal(got[care], t.outputs[care]):
        raise RTLError("internal error: minimized cover disagrees with the truth table")
    return cover


def _cube_rows(value, mask, n):
    rows = np.array([value], dtype=np.int64)
    for i in range(n):
        if mask >> i & 1:
            rows = np.concatenate([rows, rows | (1 << i)])
    return rows


def expand_cover(t: TruthTable) -> Cover:
    """Greedy single-pass minimizer for tables too wide for Quine-McCluskey.

    Each still-uncovered on-set row is grown into a cube by dropping literals
    (most significant variable first) while the cube stays inside the on-set
    plus don't-cares; redundant cubes are then removed. The result is exact
    but not guaranteed minimal.
    """
    n = t.n
    allowed = (t.outputs == 1) | t.dont_care
    on = (t.outputs == 1) & ~t.dont_care
    uncovered = on.copy()
    cubes = []
    start = 0
    while True:
        nxt = np.flatnonzero(uncovered[start:start + 4096])
        if nxt.size == 0:
            if start >= uncovered.size:
                break
            start += 4096
            continue
        v, mask = int(start + nxt[0]), 0
        for i in range(n - 1, -1, -1):
            bit = 1 << i
            trial = mask | bit
            if allowed[_cube_rows(v & ~trial, trial, n)].all():
                v, mask = v & ~bit, trial
        rows = _cube_rows(v, mask, n)
        uncovered[rows] = False
        cubes.append((v, mask, rows))

    hits = np.zeros(on.size, dtype=np.int32)
    for _, _, rows in cubes:
        hits[rows] += 1
    kept = []
    for v, mask, rows in sorted(cubes, key=lambda c: c[2].size):
        mine = rows[on[rows]]
        if mine.size and (hits[mine] >= 2).all():
            hits[rows] -= 1
        else:
            kept.append((v, mask))
    return Cover(t.variables, tuple(sorted(_pattern(v, mk, n) for v, mk in kept)))


def minimize(t: TruthTable) -> Cover:
    """Quine-McCluskey up to 16 variables, greedy cube expansion beyond."""
    return quine_mccluskey(t) if t.n <= MAX_QM_VARS else expand_cover(t)


# ------------------------------------------------------------- synthesis ----

def _fresh(base, taken):
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def synthesize_rtl(c: Cover, variables: Optional[Sequence[str]] = None,
                   name: str = "f", output: str = "f") -> Netlist:
    """Two-level wide-gate netlist: shared NOTs, one AND per implicant, one OR.

    A one-literal implicant feeds the OR directly, a lone implicant drives
    the output itself, and constant functions drive the output from the
    ``const0`` / ``const1`` pseudo-nets.
    """
    variables = tuple(variables) if variables is not None else c.variables
    if not variables:
        raise ArgumentError("synthesis needs at least one variable")
    if len(variables) != len(c.variables):
        raise ArgumentError("variable list does not match the cover")
    taken = set(variables)
    if not c.implicants:
        return Netlist(name, variables, ("const0",), (), "RTL")
    if any(set(imp) == {"-"} for imp in c.implicants):
        return Netlist(name, variables, ("const1",), (), "RTL")

    out_net = _fresh(output, taken)
    gates = []
    inv = {}
    for i, v in enumerate(variables):
        if any(imp[i] == "0" for imp in c.implicants):
            inv[v] = _fresh(f"n_{v}", taken)
            gates.append(Gate(_fresh(f"inv_{v}", taken), "NOT", (v,), inv[v]))

    single = len(c.implicants) == 1
    terms = []
    for j, imp in enumerate(c.implicants):
        lits = tuple(v if ch == "1" else inv[v] for v, ch in zip(variables, imp) if ch != "-")
        if len(lits) == 1:
            terms.append(lits[0])
            continue
        net = out_net if single else _fresh(f"p{j}", taken)
        gates.append(Gate(_fresh(f"and{j}", taken), "AND", lits, net))
        terms.append(net)

    if single:
        final = terms[0]
    else:
        gates.append(Gate(_fresh("or_out", taken), "OR", tuple(terms), out_net))
        final = out_net
    return Netlist(name, variables, (final,), tuple(gates), "RTL")


def synthesize_cmos(c: Cover, variables: Optional[Sequence[str]] = None, fanin_cap: int = 5,
                    name: str = "f", output: str = "f") -> Netlist:
    rtl = synthesize_rtl(c, variables, name, output)
    return decompose_fanin(rtl, fanin_cap).with_technology("CMOS")


def compile_expr(text: str, technology: str = "RTL", fanin_cap: int = 5, name: str = "f") -> Netlist:
    """Parse, tabulate, minimize and synthesize a boolean expression."""
    e = parse_expr(text)
    return compile_table(to_truth_table(e), technology, fanin_cap, name)


def compile_table(t: TruthTable, technology: str = "RTL", fanin_cap: int = 5, name: str = "f") -> Netlist:
    cover = minimize(t)
    if technology.upper() == "RTL":
        return synthesize_rtl(cover, t.variables, name)
    return synthesize_cmos(cover, t.variables, fanin_cap, name)
