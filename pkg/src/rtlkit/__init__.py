"""Resistive threshold logic design kit.

Divider-based gate cells, threshold-window design, boolean synthesis into
wide-gate netlists, event-driven simulation and tolerance/power analysis.
"""

from .analysis import (PerturbationSpec, analytic_worst_case, compare_report, logic_failure_rate,
                       perturb_sensitivity, power_estimate)
from .analog import DividerConfig, MemristorParams, branch_currents, divider_output, memristance
from .boolc import TruthTable, compile_expr, compile_table, parse_expr, quine_mccluskey
from .cell import GateCellConfig, build_cell, cell_noise_margin, evaluate
from .errors import (ArgumentError, CapacityError, DomainError, InfeasibleError, NetlistError,
                     ParseError, RTLError)
from .netlist import Gate, Netlist, decompose_fanin, gen_mux, gen_ripple_adder, parse_netlist
from .sim import Stimulus, critical_path, simulate, steady_state
from .threshold import ThresholdWindow, nand_window, nor_window, select_m

__version__ = "0.1.0"

__all__ = [
    "ArgumentError", "CapacityError", "DividerConfig", "DomainError", "Gate", "GateCellConfig",
    "InfeasibleError", "MemristorParams", "Netlist", "NetlistError", "ParseError", "RTLError",
    "ThresholdWindow", "branch_currents", "build_cell", "cell_noise_margin", "decompose_fanin",
    "divider_output", "evaluate", "gen_mux", "gen_ripple_adder", "memristance", "nand_window",
    "nor_window", "parse_netlist", "select_m",
    "PerturbationSpec", "analytic_worst_case", "compare_report", "logic_failure_rate",
    "perturb_sensitivity", "power_estimate",
    "TruthTable", "compile_expr", "compile_table", "parse_expr", "quine_mccluskey",
    "Stimulus", "critical_path", "simulate", "steady_state",
]
