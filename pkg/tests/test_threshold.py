from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtlkit.errors import ArgumentError, CapacityError, DomainError
from rtlkit.threshold import (InverterParams, MosfetBiasParams, body_bias_vtn, body_effect_coefficients,
                              gate_window, inverter_threshold, nand_window, nor_window, select_m,
                              surface_potential, thermal_voltage, vtn_for_threshold, vtn_vth_sweep,
                              window_by_enumeration)

K_B = 1.380649e-23
Q = 1.602176634e-19


class TestWindows:
    def test_nand_two_inputs(self):
        w = nand_window(2, 1.0)
        assert (w.low, w.high) == (pytest.approx(1 / 3), pytest.approx(2 / 3))

    def test_nor_ten_inputs_eighth(self):
        w = nor_window(10, 1 / 8)
        assert w.low == 0
        assert w.high == pytest.approx(0.0555556, abs=1e-6)

    def test_nor_twenty_inputs(self):
        assert nor_window(20, 1 / 18).high == pytest.approx(0.0263158, abs=1e-6)

    def test_nor_hundred_inputs(self):
        assert nor_window(100, 1 / 98).high == pytest.approx(0.00505050, abs=1e-8)

    def test_gate_window_aliases(self):
        assert gate_window("and", 4, 0.5).low == nand_window(4, 0.5).low
        assert gate_window("OR", 4, 0.5).high == nor_window(4, 0.5).high
        assert gate_window("NOT", 1, 1.0).function == "NOT"

    def test_unsupported_function(self):
        with pytest.raises(ArgumentError):
            gate_window("XOR", 2, 1.0)

    @pytest.mark.parametrize("n,m", [(0, 1.0), (3, 0.0), (3, -1.0)])
    def test_bad_config(self, n, m):
        with pytest.raises(ArgumentError):
            nand_window(n, m)

    def test_contains_is_strict(self):
        w = nand_window(2, 1.0)
        assert not w.contains(w.low) and not w.contains(w.high) and w.contains(0.5)

    @given(st.integers(2, 24), st.fractions(Fraction(1, 100), 10), st.fractions(-1, Fraction(1, 2)))
    def test_closed_form_equals_enumeration(self, n, m, vl):
        vh = Fraction(1)
        for fn, closed in (("NAND", nand_window), ("NOR", nor_window)):
            w, e = closed(n, m, vh, vl), window_by_enumeration(n, m, vh, vl, fn)
            assert (w.low, w.high) == (e.low, e.high)

    @given(st.integers(2, 200), st.floats(0.001, 100), st.floats(-2, 0.9))
    def test_windows_always_feasible(self, n, m, vl):
        assert nand_window(n, m, 1.0, vl).feasible
        assert nor_window(n, m, 1.0, vl).feasible

    @given(st.integers(2, 8))
    def test_exhaustive_matches_count_enumeration(self, n):
        m = Fraction(1, 2)
        for fn in ("NAND", "NOR"):
            a = window_by_enumeration(n, m, 1, 0, fn)
            b = window_by_enumeration(n, m, 1, 0, fn, exhaustive=True)
            assert (a.low, a.high) == (b.low, b.high)

    def test_xor_is_not_separable(self):
        assert not window_by_enumeration(3, Fraction(1), 1, 0, "XOR").feasible

    def test_callable_function(self):
        def majority(bits):
            return int(sum(bits) >= 2)

        w = window_by_enumeration(3, Fraction(1), 1, 0, majority)
        assert w.feasible
        assert (w.low, w.high) == (Fraction(1, 4), Fraction(2, 4))

    def test_enumeration_guard(self):
        with pytest.raises(CapacityError):
            window_by_enumeration(25, 1.0)
        with pytest.raises(CapacityError):
            window_by_enumeration(17, 1.0, exhaustive=True)


class TestSelectM:
    def test_small(self):
        assert select_m(2) == 1.0
        assert select_m(10) == pytest.approx(1 / 8)

    @given(st.integers(3, 500))
    def test_nand_lower_bound_at_midrail(self, n):
        assert nand_window(n, select_m(n)).low == pytest.approx(0.5, abs=1e-12)

    def test_rejects_one(self):
        with pytest.raises(ArgumentError):
            select_m(1)


class TestSurfacePotential:
    def test_thermal_voltage(self):
        assert thermal_voltage(300) == pytest.approx(0.025852, abs=1e-6)

    def test_reference_doping(self):
        assert surface_potential(1e17, 1.45e10) == pytest.approx(0.8141587, abs=1e-6)

    def test_independent_constants(self):
        import math
        want = 2 * K_B * 350 / Q * math.log(3e16 / 1e10)
        assert surface_potential(3e16, 1e10, 350) == pytest.approx(want, rel=1e-12)

    def test_doubling_doping(self):
        d = surface_potential(2e17, 1.45e10) - surface_potential(1e17, 1.45e10)
        assert d == pytest.approx(0.0358385, abs=1e-6)

    @pytest.mark.parametrize("args", [(0, 1e10), (1e17, -1), (1e17, 1e10, 0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            surface_potential(*args)


class TestBodyBias:
    P = MosfetBiasParams(v_tn0=0.4, v_bs=-0.5, v_bm=-3.0, v_bx=-0.2, gamma1=0.5, gamma2=0.3,
                         c_narrow=0.0, phi_s=0.8)

    def test_coefficients(self):
        k1, k2 = body_effect_coefficients(self.P)
        assert k2 == pytest.approx(-0.01897288635320127, rel=1e-12)
        assert k1 == pytest.approx(0.37396992856483413, rel=1e-12)

    def test_vtn(self):
        assert body_bias_vtn(self.P) == pytest.approx(0.49190244955102025, rel=1e-12)

    def test_zero_bias_is_vtn0(self):
        from dataclasses import replace
        assert body_bias_vtn(replace(self.P, v_bs=0.0)) == pytest.approx(0.4, abs=1e-15)

    @given(st.floats(-3, 0), st.floats(-3, 0))
    def test_reverse_bias_raises_vtn(self, a, b):
        from dataclasses import replace
        lo, hi = sorted((a, b))
        assert body_bias_vtn(replace(self.P, v_bs=lo)) >= body_bias_vtn(replace(self.P, v_bs=hi)) - 1e-15

    def test_negative_radicand(self):
        from dataclasses import replace
        with pytest.raises(DomainError):
            body_bias_vtn(replace(self.P, v_bs=1.0))


class TestInverter:
    def test_symmetric_inverter(self):
        assert inverter_threshold(InverterParams()) == pytest.approx(0.5)

    def test_strength_ratio(self):
        p = InverterParams(v_tn=0.3, v_tp=-0.5, mu_p_w_p=4.0, mu_n_w_n=1.0, v_dd=1.0)
        assert inverter_threshold(p) == pytest.approx((0.3 + 2 * 0.5) / 3)

    @given(st.floats(0.05, 0.95))
    def test_vtn_inverse(self, v_th):
        from dataclasses import replace
        p = InverterParams(mu_p_w_p=2.0)
        v_tn = vtn_for_threshold(v_th, p)
        assert inverter_threshold(replace(p, v_tn=v_tn)) == pytest.approx(v_th, abs=1e-12)


class TestSweep:
    def test_rows_inside_window(self):
        rows = vtn_vth_sweep(range(3, 101))
        assert len(rows) == 98
        for r in rows:
            assert r.window.contains(r.v_th)
            assert r.v_th > 0.5

    def test_n3_values(self):
        r = vtn_vth_sweep([3])[0]
        assert r.v_th == pytest.approx(0.5125)
        assert r.v_tn == pytest.approx(0.425)
        assert r.realizable
        p = MosfetBiasParams(v_bs=r.v_bs)
        assert body_bias_vtn(p) == pytest.approx(r.v_tn, abs=1e-9)

    def test_unreachable_reported(self):
        rows = vtn_vth_sweep([3], bias_base=MosfetBiasParams(v_tn0=0.9))
        assert not rows[0].realizable and rows[0].v_bs is None

    def test_bad_range(self):
        with pytest.raises(ArgumentError):
            vtn_vth_sweep([2])
