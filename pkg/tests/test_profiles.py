import pytest

from rtlkit.errors import ArgumentError, ParseError
from rtlkit.profiles import OPAMP_PROFILE, TSMC025_LIKE, DeviceProfile, format_kv, parse_kv


class TestKeyValue:
    def test_parse(self):
        kv = parse_kv("# header\na = 1\n\nb = x, y  # trailing\n")
        assert kv == {"a": ("1", 2), "b": ("x, y", 4)}

    def test_missing_equals(self):
        with pytest.raises(ParseError) as exc:
            parse_kv("a = 1\nbogus\n")
        assert exc.value.line == 2

    def test_duplicate(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_kv("a = 1\na = 2\n")

    def test_bad_key(self):
        with pytest.raises(ParseError):
            parse_kv("2x = 1\n")

    def test_format(self):
        assert format_kv({"a": 1.5, "b": (1.0, 2.0), "c": None}, "h") == "# h\na = 1.5\nb = 1.0, 2.0\n"


class TestProfile:
    @pytest.mark.parametrize("p", [TSMC025_LIKE, OPAMP_PROFILE, TSMC025_LIKE.with_(phi_s=0.8, v_low=0.1)])
    def test_round_trip(self, p):
        assert DeviceProfile.from_text(p.to_text()) == p

    def test_partial_file_uses_defaults(self):
        p = DeviceProfile.from_text("device = opamp\nv_high = 1.2\n")
        assert p.device == "opamp" and p.v_high == 1.2 and p.v_tn == TSMC025_LIKE.v_tn

    def test_stage_vdds_scale(self):
        p = TSMC025_LIKE.with_(v_dd=2.0)
        assert p.stage_vdds == (0.5, 1.0, 2.0)

    def test_unknown_key(self):
        with pytest.raises(ParseError, match="unknown"):
            DeviceProfile.from_text("v_hgih = 1\n")

    def test_bad_value_has_line(self):
        with pytest.raises(ParseError) as exc:
            DeviceProfile.from_text("v_high = 1\nv_low = zero\n")
        assert exc.value.line == 2

    def test_bad_device(self):
        with pytest.raises(ArgumentError):
            DeviceProfile(device="memristor")

    def test_load(self, tmp_path):
        f = tmp_path / "p.prof"
        f.write_text(OPAMP_PROFILE.to_text())
        assert DeviceProfile.load(f) == OPAMP_PROFILE

    def test_parts(self):
        assert TSMC025_LIKE.inverter().v_dd == 1.0
        assert TSMC025_LIKE.bias().surface_potential == pytest.approx(0.8141587, abs=1e-6)
        assert TSMC025_LIKE.divider(4, 0.5).r_ref == pytest.approx(5e4)
