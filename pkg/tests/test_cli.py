import csv
import io
import math

import numpy as np
import pytest

import pccodec as pc
from pccodec.cli import main

from conftest import ABRA


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text, header):
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0].keys()) == header.split(",")
    return rows


class TestEncodeDecode:
    def test_text_roundtrip(self, tmp_path, capsys):
        src = tmp_path / "in.txt"
        enc = tmp_path / "out.pcc"
        dec = tmp_path / "back.txt"
        src.write_text("1 2 3 1 4 1 5 1 2 3 1\n")
        code, _, err = run_cli(capsys, "encode", str(src), str(enc))
        assert code == 0 and "payload_bits" in err
        code, _, _ = run_cli(capsys, "decode", str(enc), str(dec))
        assert code == 0
        assert dec.read_text().split() == src.read_text().split()

    def test_text_canonical_file_roundtrip(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        for trial in range(4):
            syms = rng.integers(1, 500, size=rng.integers(0, 200))
            body = (" ".join(map(str, syms)) + "\n") if syms.size else ""
            src = tmp_path / f"i{trial}.txt"
            src.write_bytes(body.encode())
            enc = tmp_path / f"i{trial}.pcc"
            dec = tmp_path / f"i{trial}.back"
            assert run_cli(capsys, "encode", str(src), str(enc))[0] == 0
            assert run_cli(capsys, "decode", str(enc), str(dec))[0] == 0
            assert dec.read_bytes() == src.read_bytes()

    def test_bytes_roundtrip(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        for trial in range(4):
            blob = rng.integers(0, 256, size=rng.integers(0, 4000)).astype(np.uint8).tobytes()
            src = tmp_path / f"b{trial}.bin"
            src.write_bytes(blob)
            enc = tmp_path / f"b{trial}.pcc"
            dec = tmp_path / f"b{trial}.out"
            assert run_cli(capsys, "encode", str(src), str(enc), "--mode", "bytes")[0] == 0
            assert run_cli(capsys, "decode", str(enc), str(dec), "--mode", "bytes")[0] == 0
            assert dec.read_bytes() == blob

    def test_empty_file(self, tmp_path, capsys):
        src = tmp_path / "e.txt"
        src.write_text("")
        enc = tmp_path / "e.pcc"
        dec = tmp_path / "e.back"
        assert run_cli(capsys, "encode", str(src), str(enc))[0] == 0
        assert pc.PcContainer.read(enc).bit_length <= 5
        assert run_cli(capsys, "decode", str(enc), str(dec))[0] == 0
        assert dec.read_bytes() == b""

    def test_zero_symbol_rejected(self, tmp_path, capsys):
        src = tmp_path / "z.txt"
        src.write_text("0\n")
        code, _, err = run_cli(capsys, "encode", str(src), str(tmp_path / "z.pcc"))
        assert code == 3 and "pccodec:" in err

    def test_truncated_container(self, tmp_path, capsys):
        enc = tmp_path / "t.pcc"
        blob = pc.encode(ABRA).to_bytes()
        enc.write_bytes(blob[:-1])
        code, _, err = run_cli(capsys, "decode", str(enc), str(tmp_path / "t.out"))
        assert code == 3

    def test_wrong_magic(self, tmp_path, capsys):
        enc = tmp_path / "m.pcc"
        enc.write_bytes(b"NOPE" + pc.encode(ABRA).to_bytes()[4:])
        code, _, err = run_cli(capsys, "decode", str(enc), str(tmp_path / "m.out"))
        assert code == 3 and "magic" in err

    def test_missing_input(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "encode", str(tmp_path / "nope.txt"),
                               str(tmp_path / "o.pcc"))
        assert code == 3

    def test_usage_error_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bounds"])  # missing required flags
        assert exc.value.code == 2


class TestReports:
    def test_bounds_golden_row(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--env", "geom:C=2,q=0.5", "--n", "8")
        assert code == 0
        rows = parse_csv(out, "env,n,r_f,upper_integral,upper_count,upper_mass,"
                              "head_term,lower_integral,lower_EfKn")
        assert float(rows[0]["r_f"]) == pytest.approx(1.5, abs=1e-12)
        assert float(rows[0]["upper_count"]) == pytest.approx(3 * math.log2(math.e), rel=1e-10)

    def test_bounds_small_n_has_nan_lower(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--env", "geom:C=2,q=0.5", "--n", "4,16")
        rows = parse_csv(out, "env,n,r_f,upper_integral,upper_count,upper_mass,"
                              "head_term,lower_integral,lower_EfKn")
        assert math.isnan(float(rows[0]["lower_integral"]))
        assert math.isfinite(float(rows[1]["lower_integral"]))

    def test_simulate_deterministic(self, capsys):
        args = ("simulate", "--env", "geom:C=2,q=0.5", "--n", "64,128",
                "--trials", "5", "--seed", "7")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
        rows = parse_csv(out1, "env,source,n,trial,code_bits,ideal_bits,neg_log_p,"
                               "redundancy_bits")
        assert len(rows) == 10
        for row in rows:
            assert float(row["code_bits"]) >= float(row["ideal_bits"])
            assert float(row["redundancy_bits"]) == pytest.approx(
                float(row["ideal_bits"]) - float(row["neg_log_p"]), rel=1e-9)

    def test_lemmas_all_ok(self, capsys):
        code, out, _ = run_cli(capsys, "lemmas", "--env", "power:C=1,alpha=0.5",
                               "--n", "1000", "--trials", "400", "--seed", "3")
        assert code == 0
        rows = parse_csv(out, "lemma,n,param,lhs,rhs,slack,status")
        assert rows and all(row["status"] == "OK" for row in rows)

    def test_bad_envelope_exit(self, capsys):
        code, _, err = run_cli(capsys, "bounds", "--env", "geom:C=0.5,q=0.5", "--n", "8")
        assert code == 3
