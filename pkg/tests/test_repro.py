import pytest

from rtlkit.repro import REPRO, fig8_stimulus


@pytest.mark.parametrize("name", list(REPRO))
def test_entry_passes(name):
    res = REPRO[name]()
    assert res.checks, "every entry checks something"
    assert res.passed, res.summary()
    assert res.to_csv().splitlines()[0] == ",".join(res.header)


class TestNotes:
    def test_table1_flags_inconsistent_branch_current(self):
        res = REPRO["table1"]()
        assert any("n=100 per-branch" in n for n in res.notes)

    def test_table7_flags_and_count(self):
        assert any("24" in n and "48" in n for n in REPRO["table7"]().notes)


class TestFig8Stimulus:
    def test_shape(self):
        s = fig8_stimulus(bits=2)
        init = s.initial_levels()
        assert init == {"a0": 0, "b0": 0, "a1": 0, "b1": 0, "cin": 0}
        a0 = [(round(t * 1e6), lv) for t, n, lv in s.events if n == "a0"]
        assert a0 == [(0, 0), (10, 1), (30, 0), (50, 1), (70, 0), (90, 1)]
        b0 = [round(t * 1e6) for t, n, _ in s.events if n == "b0"]
        assert b0 == [0, 10, 20, 30, 40, 50, 60, 70, 80, 90]
