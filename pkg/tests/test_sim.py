import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import random_netlists

from rtlkit.errors import ArgumentError, ParseError
from rtlkit.netlist import Gate, Netlist, decompose_fanin, gen_mux, gen_ripple_adder
from rtlkit.sim import (Stimulus, critical_path, evaluate_batch, simulate, square_wave, steady_state)

US = 1e-6


def _wide(kind, n, tech="RTL"):
    ins = tuple(f"x{i}" for i in range(n))
    return Netlist("w", ins, ("y",), (Gate("g", kind, ins, "y"),), tech)


def _adder_levels(bits, a, b, cin=0):
    lv = {f"a{i}": (a >> i) & 1 for i in range(bits)}
    lv.update({f"b{i}": (b >> i) & 1 for i in range(bits)})
    lv["cin"] = cin
    return lv


class TestSteadyState:
    def test_adder_overflow(self):
        out = steady_state(gen_ripple_adder(16), _adder_levels(16, 0xFFFF, 1))
        assert out == (0,) * 16 + (1,)

    def test_mux_select(self):
        lv = {f"s{j}": (5 >> j) & 1 for j in range(4)}
        lv.update({f"d{i}": int(i == 5) for i in range(16)})
        assert steady_state(gen_mux(16), lv) == (1,)
        lv["d5"] = 0
        lv["d4"] = 1
        assert steady_state(gen_mux(16), lv) == (0,)

    def test_missing_input(self):
        with pytest.raises(ArgumentError):
            steady_state(gen_mux(2), {"s0": 1})

    @given(random_netlists())
    def test_batch_matches_scalar(self, n):
        k = len(n.inputs)
        x = np.array([[(v >> i) & 1 for i in range(k)] for v in range(1 << k)], dtype=np.uint8)
        got = evaluate_batch(n, x)
        for row, out in zip(x, got):
            assert tuple(out) == steady_state(n, row.tolist())

    def test_batch_shape(self):
        with pytest.raises(ArgumentError):
            evaluate_batch(gen_mux(2), np.zeros((4, 2)))


class TestSimulate:
    def test_not_step(self):
        n = Netlist("inv", ("a",), ("y",), (Gate("g", "NOT", ("a",), "y"),))
        w = simulate(n, Stimulus(((0, "a", 0), (10 * US, "a", 1))), 20 * US)
        assert w.changes["y"] == [(0.0, 1), (pytest.approx(10.45 * US), 0)]
        assert w.value_at("y", 10.4 * US) == 1 and w.value_at("y", 10.5 * US) == 0

    @pytest.mark.parametrize("width", [3, 1000])
    def test_rtl_nand_fanin_invariant(self, width):
        n = _wide("NAND", width)
        s = Stimulus.from_levels(n, [1] * (width - 1) + [0]).then(1 * US, {f"x{width - 1}": 1})
        w = simulate(n, s, 5 * US)
        assert w.changes["y"][-1] == (pytest.approx(1.45 * US), 0)

    def test_cmos_slower_with_fanin(self):
        t = []
        for width in (3, 1000):
            n = _wide("NAND", width, "CMOS")
            s = Stimulus.from_levels(n, [1] * (width - 1) + [0]).then(1 * US, {f"x{width - 1}": 1})
            t.append(simulate(n, s, 5 * US).changes["y"][-1][0])
        assert t[0] < t[1]

    def test_explicit_gate_delay(self):
        n = Netlist("d", ("a",), ("y",), (Gate("g", "NOT", ("a",), "y", delay=2 * US),))
        w = simulate(n, Stimulus(((0, "a", 0), (1 * US, "a", 1))), 5 * US)
        assert w.changes["y"][-1][0] == pytest.approx(3 * US)

    def test_adder_settles_on_critical_path(self):
        n = gen_ripple_adder(16)
        s = Stimulus.from_levels(n, _adder_levels(16, 0xFFFF, 0)).then(10 * US, {"b0": 1})
        cp = critical_path(n).delay
        w = simulate(n, s, 10 * US + cp + 5 * US)
        assert w.final_levels(n.outputs) == (0,) * 16 + (1,)
        assert w.last_change(n.outputs) <= 10 * US + cp + 1e-12
        assert w.last_change(n.outputs) > 10 * US + cp / 2

    def test_empty_stimulus(self):
        n = gen_ripple_adder(4)
        lv = _adder_levels(4, 9, 7, 1)
        w = simulate(n, Stimulus.from_levels(n, lv), 50 * US)
        assert w.final_levels(n.outputs) == steady_state(n, lv)
        assert w.last_change() == 0.0

    def test_truncated_at_t_end(self):
        n = Netlist("inv", ("a",), ("y",), (Gate("g", "NOT", ("a",), "y"),))
        w = simulate(n, Stimulus(((0, "a", 0), (10 * US, "a", 1))), 10.2 * US)
        assert w.changes["y"] == [(0.0, 1)]

    def test_glitch_free_reconvergence(self):
        # y = a & !a stays 0 at steady state; transport delay may glitch but must return to 0
        n = Netlist("g", ("a",), ("y",), (Gate("i", "NOT", ("a",), "na"), Gate("g", "AND", ("a", "na"), "y")))
        w = simulate(n, Stimulus(((0, "a", 0), (1 * US, "a", 1))), 5 * US)
        assert w.final_levels(["y"]) == (0,)

    @given(random_netlists(), st.data())
    def test_final_equals_steady_state(self, n, data):
        k = len(n.inputs)
        v0 = data.draw(st.lists(st.integers(0, 1), min_size=k, max_size=k))
        s = Stimulus.from_levels(n, v0)
        t = 0.0
        for _ in range(data.draw(st.integers(0, 4))):
            t += data.draw(st.sampled_from([0.1, 0.3, 1.0, 2.5])) * US
            net = data.draw(st.sampled_from(n.inputs))
            s = s.then(t, {net: data.draw(st.integers(0, 1))})
        cp = critical_path(n).delay
        w = simulate(n, s, t + cp + 1 * US)
        final_in = {x: w.changes[x][-1][1] for x in n.inputs}
        assert w.final_levels(n.outputs) == steady_state(n, final_in)
        assert w.last_change(n.outputs) <= t + cp + 1e-12
        for net, ch in w.changes.items():
            times = [tc for tc, _ in ch]
            assert len(times) == len(set(times))
            levels = [lv for _, lv in ch]
            assert all(a != b for a, b in zip(levels, levels[1:]))

    def test_errors(self):
        n = gen_mux(2)
        with pytest.raises(ArgumentError):
            simulate(n, Stimulus.from_levels(n, [0, 0, 0]), -1.0)
        with pytest.raises(ArgumentError, match="uninitialized"):
            simulate(n, Stimulus(((0, "s0", 0),)), 1 * US)
        with pytest.raises(ArgumentError):
            simulate(n, Stimulus(((0, "y", 0),)), 1 * US)


class TestStimulus:
    def test_csv_round_trip(self):
        s = Stimulus(((0, "a", 0), (0, "b", 1), (1.5 * US, "a", 1), (3 * US, "b", 0)))
        back = Stimulus.from_csv(s.to_csv())
        assert [(pytest.approx(t), n, l) for t, n, l in s.events] == list(back.events)

    def test_csv_errors(self):
        with pytest.raises(ParseError) as exc:
            Stimulus.from_csv("time_us,net,level\n0,a,0\nx,a,1\n")
        assert exc.value.line == 3
        with pytest.raises(ParseError):
            Stimulus.from_csv("0,a,0\n2,a,1\n1,a,0\n")

    def test_validation(self):
        with pytest.raises(ArgumentError):
            Stimulus(((-1, "a", 0),))
        with pytest.raises(ArgumentError):
            Stimulus(((0, "a", 2),))

    def test_square_wave(self):
        ev = square_wave("a", 10 * US, 20 * US, 90 * US)
        assert [round(t / US) for t, _, _ in ev] == [0, 10, 30, 50, 70, 90]
        assert [lv for _, _, lv in ev] == [0, 1, 0, 1, 0, 1]

    def test_waveform_csv_sorted(self):
        n = Netlist("inv", ("a",), ("y",), (Gate("g", "NOT", ("a",), "y"),))
        w = simulate(n, Stimulus(((0, "a", 0), (10 * US, "a", 1))), 20 * US)
        assert w.to_csv().splitlines() == ["time_us,net,level", "0.000000,a,0", "0.000000,y,1",
                                           "10.000000,a,1", "10.450000,y,0"]


class TestCriticalPath:
    def test_or16_cap5(self):
        d = decompose_fanin(_wide("OR", 16), 5)
        assert critical_path(d).delay == pytest.approx(2 * 0.60 * US)

    def test_adder_rtl_faster(self):
        add = gen_ripple_adder(16)
        rtl = critical_path(add)
        cmos = critical_path(add.with_technology("CMOS"))
        assert rtl.delay < cmos.delay
        assert rtl.delay == pytest.approx(17.25 * US)
        assert len(rtl.path) == 33

    def test_single_gate(self):
        assert critical_path(_wide("NOR", 4)).path == ("g",)
