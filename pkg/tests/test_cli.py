import pytest

from rtlkit.cli import main
from rtlkit.netlist import gen_mux, parse_netlist
from rtlkit.sim import steady_state


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _exit_code(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    capsys.readouterr()
    return exc.value.code


class TestGate:
    def test_nand2(self, capsys):
        code, out, _ = run(capsys, "gate", "--fn", "nand", "--n", "2")
        assert code == 0
        assert "window = (0.3333, 0.6667)" in out and "m = 1" in out

    def test_nor10(self, capsys):
        code, out, _ = run(capsys, "gate", "--fn", "nor", "--n", "10")
        assert code == 0 and "m = 0.125" in out and "(0.0000, 0.0556)" in out

    def test_ratio_m(self, capsys):
        code, out, _ = run(capsys, "gate", "--fn", "nor", "--n", "10", "--m", "1/8")
        assert code == 0 and "m = 0.125" in out

    def test_opamp_delta(self, capsys):
        code, out, _ = run(capsys, "gate", "--fn", "nor", "--n", "10", "--device", "opamp", "--delta", "0.02")
        assert code == 0 and "threshold = 0.02 V" in out

    def test_unknown_fn(self, capsys):
        assert _exit_code(capsys, "gate", "--fn", "xor", "--n", "2") == 64

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "gate", "--fn", "nor", "--n", "10", "--threshold", "0.3")
        assert code == 2 and "infeasible" in err

    def test_bad_profile_file(self, capsys, tmp_path):
        f = tmp_path / "p.prof"
        f.write_text("v_high = 1\nbogus\n")
        code, _, _ = run(capsys, "gate", "--fn", "nand", "--n", "2", "--profile", str(f))
        assert code == 65


class TestCompile:
    def test_expr(self, capsys):
        code, out, err = run(capsys, "compile", "--expr", "a&b|c")
        n = parse_netlist(out)
        assert code == 0 and sorted(g.kind for g in n.gates) == ["AND", "OR"]

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "compile", "--expr", "a & (b")
        assert code == 65 and "line 1" in err and "column 7" in err

    def test_missing_source(self, capsys):
        assert _exit_code(capsys, "compile") == 64

    def test_table_file(self, capsys, tmp_path):
        t = tmp_path / "t.tt"
        t.write_text("a b\n01 1\n10 1\n")
        out = tmp_path / "x.net"
        code, _, _ = run(capsys, "compile", "--table", str(t), "--tech", "cmos", "-o", str(out))
        n = parse_netlist(out.read_text())
        assert code == 0 and n.technology == "CMOS"
        assert [steady_state(n, [a, b])[0] for a in (0, 1) for b in (0, 1)] == [0, 1, 1, 0]

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "compile", "--table", str(tmp_path / "none.tt"))
        assert code == 66

    def test_capacity(self, capsys):
        code, _, _ = run(capsys, "compile", "--expr", "|".join(f"x{i}" for i in range(25)))
        assert code == 65


class TestGenSim:
    def test_gen_mux(self, capsys):
        code, out, _ = run(capsys, "gen", "mux", "--size", "16")
        assert code == 0 and parse_netlist(out) == gen_mux(16)

    def test_gen_bad_size(self, capsys):
        code, _, _ = run(capsys, "gen", "mux", "--size", "6")
        assert code == 64

    def test_adder_sim_pipeline(self, capsys, tmp_path):
        net, stim, wave = tmp_path / "a.net", tmp_path / "s.csv", tmp_path / "w.csv"
        assert run(capsys, "gen", "adder", "--bits", "4", "-o", str(net))[0] == 0
        assert run(capsys, "gen", "fig8-stim", "--bits", "4", "-o", str(stim))[0] == 0
        code, _, err = run(capsys, "sim", "--netlist", str(net), "--stim", str(stim), "-o", str(wave))
        assert code == 0 and "critical path" in err
        assert wave.read_text().startswith("time_us,net,level\n0.000000,a0,0")

    def test_sim_bad_stimulus(self, capsys, tmp_path):
        net, stim = tmp_path / "a.net", tmp_path / "s.csv"
        run(capsys, "gen", "mux", "--size", "2", "-o", str(net))
        stim.write_text("time_us,net,level\n0,s0,0\n")
        code, _, _ = run(capsys, "sim", "--netlist", str(net), "--stim", str(stim))
        assert code == 65

    def test_bad_netlist(self, capsys, tmp_path):
        net = tmp_path / "bad.net"
        net.write_text("name b\ninput a\noutput y\ngate g AND in=a,q out=y\n")
        code, _, err = run(capsys, "power", "--netlist", str(net))
        assert code == 65 and "line 4" in err


class TestAnalysisCommands:
    def test_mc(self, capsys, tmp_path):
        csv = tmp_path / "mc.csv"
        code, out, _ = run(capsys, "mc", "--n", "100", "--seed", "42", "-o", str(csv))
        assert code == 0 and "max |dV0| = 0.0990%" in out
        assert len(csv.read_text().splitlines()) == 10_001

    def test_mc_k_too_large(self, capsys):
        code, _, _ = run(capsys, "mc", "--n", "4", "--k", "5", "--trials", "10")
        assert code == 64

    def test_compare(self, capsys, tmp_path):
        a, b = tmp_path / "a.net", tmp_path / "b.net"
        run(capsys, "gen", "mux", "-o", str(a))
        run(capsys, "gen", "mux", "--tech", "cmos", "-o", str(b))
        code, out, _ = run(capsys, "compare", "--a", str(a), "--b", str(b))
        assert code == 0 and "PASS  mux: RTL area < CMOS area" in out
        code, out, _ = run(capsys, "compare", "--a", str(a), "--b", str(b), "--format", "csv")
        assert out.startswith("metric,mux16/RTL,mux16/CMOS,delta")

    def test_power(self, capsys, tmp_path):
        a = tmp_path / "a.net"
        run(capsys, "gen", "mux", "--size", "4", "-o", str(a))
        code, out, _ = run(capsys, "power", "--netlist", str(a), "--activity", "0.5")
        assert code == 0 and "W at input activity 0.5" in out

    def test_repro(self, capsys, tmp_path):
        code, out, _ = run(capsys, "repro", "table2", "--out-dir", str(tmp_path))
        assert code == 0 and "PASS  table2: NAND column" in out
        assert (tmp_path / "table2.csv").read_text().startswith("v1,v2,v0,nand,nor")

    def test_no_command(self, capsys):
        assert _exit_code(capsys) == 64
