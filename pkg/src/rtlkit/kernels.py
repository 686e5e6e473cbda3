"""Hot numeric kernels.

Each kernel has a numba implementation (``*_jit``) and a numpy
implementation (``*_np``). The public name dispatches on
:data:`rtlkit._jit.JIT_ENABLED`.
"""

import numpy as np

from ._jit import JIT_ENABLED, njit

# Opcodes for the batch gate evaluator.
OP_AND = 0
OP_OR = 1
OP_NAND = 2
OP_NOR = 3
OP_NOT = 4

OPCODES = {"AND": OP_AND, "OR": OP_OR, "NAND": OP_NAND, "NOR": OP_NOR, "NOT": OP_NOT}


# ---------------------------------------------------------------- divider ---

def divider_matrix_np(g, g0, v):
    """Divider outputs for T conductance draws against V input vectors.

    g:  (T, n) input conductances
    g0: (T,) reference conductances
    v:  (n, V) input voltages, one column per vector
    returns (T, V)
    """
    num = g @ v
    den = g0 + g.sum(axis=1)
    return num / den[:, None]


@njit
def divider_matrix_jit(g, g0, v):
    num = np.dot(g, v)
    t_count, n = g.shape
    for t in range(t_count):
        den = g0[t]
        for j in range(n):
            den += g[t, j]
        for k in range(num.shape[1]):
            num[t, k] /= den
    return num


def divider_matrix(g, g0, v):
    g = np.ascontiguousarray(g, dtype=np.float64)
    g0 = np.ascontiguousarray(g0, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    if JIT_ENABLED:
        return divider_matrix_jit(g, g0, v)
    return divider_matrix_np(g, g0, v)


# ---------------------------------------------------------------- netlist ---

def eval_gates_np(ops, in_ptr, in_idx, out_idx, values):
    """Evaluate gates in the given (topological) order, in place.

    values is a (nets, B) uint8 matrix of 0/1 levels; rows for primary
    inputs must be filled before the call.
    """
    for g in range(ops.shape[0]):
        rows = values[in_idx[in_ptr[g]:in_ptr[g + 1]]]
        op = ops[g]
        if op == OP_AND or op == OP_NAND:
            r = np.bitwise_and.reduce(rows, axis=0)
        elif op == OP_OR or op == OP_NOR:
            r = np.bitwise_or.reduce(rows, axis=0)
        else:
            r = rows[0]
        if op == OP_NAND or op == OP_NOR or op == OP_NOT:
            r = r ^ 1
        values[out_idx[g]] = r
    return values


@njit
def eval_gates_jit(ops, in_ptr, in_idx, out_idx, values):
    batch = values.shape[1]
    for g in range(ops.shape[0]):
        op = ops[g]
        lo = in_ptr[g]
        hi = in_ptr[g + 1]
        out = values[out_idx[g]]
        first = values[in_idx[lo]]
        for b in range(batch):
            out[b] = first[b]
        # row-wise sweeps keep the inner loop contiguous
        for k in range(lo + 1, hi):
            row = values[in_idx[k]]
            if op == OP_AND or op == OP_NAND:
                for b in range(batch):
                    out[b] &= row[b]
            else:
                for b in range(batch):
                    out[b] |= row[b]
        if op == OP_NAND or op == OP_NOR or op == OP_NOT:
            for b in range(batch):
                out[b] ^= 1
    return values


def eval_gates(ops, in_ptr, in_idx, out_idx, values):
    if JIT_ENABLED:
        return eval_gates_jit(ops, in_ptr, in_idx, out_idx, values)
    return eval_gates_np(ops, in_ptr, in_idx, out_idx, values)
