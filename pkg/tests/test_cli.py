"""CLI contract: subcommands, exit codes, determinism, cache transparency."""

import json

from expsumlab.cli import main

CUBIC = "[1,1,0,1]"


def run_main(args):
    """Run via the entry point, capturing the integer exit code."""
    import contextlib
    import io

    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = main(args)
    return code, out.getvalue()


class TestClassifyCommand:
    def test_symmetric_cubic(self):
        code, out = run_main(["classify", "--poly", CUBIC])
        assert code == 0
        assert json.loads(out)["verdict"] == "SymmetricSidonMorse"

    def test_not_morse_is_definite(self):
        code, out = run_main(["classify", "--poly", "[0,0,0,1]"])
        assert code == 0
        assert json.loads(out)["verdict"] == "NotMorse"

    def test_malformed_poly_is_usage_error(self):
        code, _ = run_main(["classify", "--poly", "[1,1,0"])
        assert code == 64


class TestMomentsCommand:
    def test_rows_and_schema(self):
        code, out = run_main(
            ["moments", "--poly", CUBIC, "--primes", "101,103", "--exponents", "2,4"]
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "# expsum-lab schema v1"
        data_rows = [l for l in lines if not l.startswith("#")][1:]
        assert len(data_rows) == 2

    def test_empty_primes_usage(self):
        code, _ = run_main(["moments", "--poly", CUBIC, "--primes", ""])
        assert code == 64

    def test_nonprime_rejected(self):
        code, _ = run_main(["moments", "--poly", CUBIC, "--primes", "100"])
        assert code == 64

    def test_determinism(self):
        args = ["--seed", "3", "moments", "--poly", CUBIC, "--primes", "101..199"]
        _, out1 = run_main(list(args))
        _, out2 = run_main(list(args))
        assert out1 == out2

    def test_quartic_split_by_residue_class(self):
        # X^4: second moments split by p mod 4 (three components vs one)
        code, out = run_main(
            ["moments", "--poly", "[0,0,0,0,1]", "--primes", "103,113",
             "--exponents", "2"]
        )
        assert code == 0
        rows = {
            int(l.split(",")[0]): float(l.split(",")[1])
            for l in out.splitlines()
            if l and not l.startswith("#") and not l.startswith("p,")
        }
        assert abs(rows[113] - 3) < 0.5   # 113 = 1 mod 4
        assert abs(rows[103] - 1) < 0.5   # 103 = 3 mod 4

    def test_threads_do_not_change_bytes(self):
        base = ["moments", "--poly", CUBIC, "--primes", "101..199"]
        _, seq = run_main(["--threads", "1"] + base)
        _, par = run_main(["--threads", "4"] + base)
        assert seq == par


class TestSweepCommand:
    def test_basic(self):
        code, out = run_main(
            ["sweep", "--poly", CUBIC, "--x", "2000", "--grid", "1000,2000"]
        )
        assert code == 0
        rows = [l for l in out.splitlines() if not l.startswith("#")]
        assert rows[0].startswith("x,")
        assert len(rows) == 3

    def test_a_zero_rejected(self):
        code, _ = run_main(["sweep", "--poly", CUBIC, "--a", "0", "--x", "1000"])
        assert code == 64

    def test_cap_exit(self):
        code, _ = run_main(["sweep", "--poly", CUBIC, "--x", "50000"])
        assert code == 65

    def test_two_polynomial_product_same_schema(self):
        single = run_main(
            ["sweep", "--poly", CUBIC, "--x", "600", "--grid", "300,600"]
        )[1]
        double = run_main(
            ["sweep", "--poly", CUBIC, "--poly", "[1,-1,0,1]", "--x", "600",
             "--grid", "300,600"]
        )[1]
        header = [l for l in single.splitlines() if l.startswith("x,")]
        header2 = [l for l in double.splitlines() if l.startswith("x,")]
        assert header == header2  # identical column schema

    def test_cold_warm_cache_identical(self, tmp_path):
        cache = str(tmp_path / "cache")
        args = ["--cache-dir", cache, "sweep", "--poly", CUBIC, "--x", "600",
                "--grid", "300,600"]
        _, cold = run_main(list(args))
        _, warm = run_main(list(args))
        assert cold == warm
        # entries exist for the primes used
        code, listing = run_main(["--cache-dir", cache, "cache", "list"])
        assert code == 0
        assert "dist" in listing


class TestCrossAndShao:
    def test_cross(self):
        code, out = run_main(
            ["cross", "--poly", CUBIC, "--poly", "[1,-1,0,1]",
             "--primes", "101", "--k", "1"]
        )
        assert code == 0
        assert "target" in out

    def test_shao_small_grid_usage(self):
        code, _ = run_main(["shao", "--poly", CUBIC, "--x-grid", "50"])
        assert code == 64


class TestRmtCommand:
    def test_table(self):
        code, out = run_main(
            ["rmt", "--family", "usp", "--n", "4", "--kmax", "2",
             "--samples", "5000"]
        )
        assert code == 0
        rows = [l for l in out.splitlines() if not l.startswith("#")]
        assert rows[0] == "family,n,k,reference,exact,mc,se"
        assert len(rows) == 4

    def test_odd_symplectic_usage(self):
        code, _ = run_main(["rmt", "--family", "usp", "--n", "3"])
        assert code == 64


class TestOracleCommand:
    def test_pass(self):
        code, out = run_main(["oracle", "--poly", CUBIC, "--p", "101"])
        assert code == 0
        assert "FAIL" not in out

    def test_nonprime(self):
        code, _ = run_main(["oracle", "--poly", CUBIC, "--p", "100"])
        assert code == 64

    def test_corrupted_cache_recovers(self, tmp_path):
        cache_dir = tmp_path / "cache"
        args = ["--cache-dir", str(cache_dir), "oracle", "--poly", CUBIC,
                "--p", "101"]
        code, _ = run_main(list(args))
        assert code == 0
        # corrupt the stored table out-of-band
        victim = next(cache_dir.glob("*.exps"))
        raw = bytearray(victim.read_bytes())
        raw[60] ^= 0xFF
        victim.write_bytes(bytes(raw))
        code, out = run_main(list(args))
        assert code == 0
        assert "recomputed" in out


class TestConfig:
    def test_config_file_and_unknown_key(self, tmp_path):
        good = tmp_path / "good.cfg"
        good.write_text("seed=5\nthreads=2\n")
        code, _ = run_main(
            ["--config", str(good), "classify", "--poly", CUBIC]
        )
        assert code == 0
        bad = tmp_path / "bad.cfg"
        bad.write_text("sede=5\n")
        code, _ = run_main(["--config", str(bad), "classify", "--poly", CUBIC])
        assert code == 64

    def test_cache_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EXPSUMLAB_CACHE_DIR", str(tmp_path / "envcache"))
        code, _ = run_main(["oracle", "--poly", CUBIC, "--p", "13"])
        assert code == 0
        assert (tmp_path / "envcache").exists()


class TestFigures:
    def test_sweep_renders_png(self, tmp_path):
        figs = tmp_path / "figs"
        code, _ = run_main(
            ["--figures", str(figs), "sweep", "--poly", CUBIC, "--x", "600",
             "--grid", "300,600"]
        )
        assert code == 0
        pngs = list(figs.glob("*_sweep.png"))
        assert len(pngs) == 1 and pngs[0].stat().st_size > 0

    def test_rmt_renders_png(self, tmp_path):
        figs = tmp_path / "figs"
        code, _ = run_main(
            ["--figures", str(figs), "rmt", "--family", "su", "--n", "2",
             "--kmax", "2", "--samples", "2000"]
        )
        assert code == 0
        assert list(figs.glob("su2_rmt.png"))

    def test_moments_dichotomy_shao_render(self, tmp_path):
        figs = tmp_path / "figs"
        for args, pattern in (
            (["moments", "--poly", CUBIC, "--primes", "101,103"], "*_moments.png"),
            (["dichotomy", "--poly", CUBIC, "--pmax", "60"], "*_dichotomy.png"),
            (["shao", "--poly", CUBIC, "--x-grid", "300,600"], "*_shao.png"),
        ):
            code, _ = run_main(["--figures", str(figs)] + args)
            assert code == 0
            assert list(figs.glob(pattern)), pattern
