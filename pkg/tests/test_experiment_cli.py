import json
from fractions import Fraction

import pytest

from linequiv.cli import main, parse_fraction
from linequiv.experiment import (
    CSV_HEADER,
    ExperimentConfig,
    make_instance,
    rows_to_csv,
    run_experiment,
)
from linequiv.lindist import linear_distance
from linequiv.protocol import FAR, NEAR


def strip_wall_ms(csv_text: str) -> str:
    """Everything but the timing column is part of the determinism contract."""
    return "\n".join(
        ",".join(line.split(",")[:-1]) for line in csv_text.splitlines()
    )


class TestInstanceGeneration:
    def test_near_is_isomorphic(self):
        inst = make_instance(NEAR, "uniform-random", 3, Fraction(0), Fraction(1, 4), 1)
        assert inst.ground_truth == NEAR
        assert linear_distance(inst.f, inst.g).value == 0

    def test_far_is_certified(self):
        inst = make_instance(FAR, "uniform-random", 3, Fraction(0), Fraction(1, 4), 1)
        assert inst.ground_truth == FAR
        assert linear_distance(inst.f, inst.g).value >= Fraction(1, 4)

    def test_deterministic(self):
        a = make_instance(FAR, "planted-junta:2", 4, Fraction(0), Fraction(1, 4), 9)
        b = make_instance(FAR, "planted-junta:2", 4, Fraction(0), Fraction(1, 4), 9)
        assert (a.f, a.g) == (b.f, b.g)


class TestRunExperiment:
    CONFIG = ExperimentConfig(
        protocol="public",
        family="uniform-random",
        n_values=(3,),
        omegas=(Fraction(1, 4),),
        trials=6,
        base_seed=11,
    )

    def test_rows_and_header(self):
        rows = run_experiment(self.CONFIG)
        assert len(rows) == 2  # near + far sub-cells
        csv_text = rows_to_csv(rows)
        assert csv_text.splitlines()[0] == CSV_HEADER
        assert {r.family for r in rows} == {
            "uniform-random/near", "uniform-random/far"
        }
        assert all(r.correct_frac == 1 for r in rows)
        assert all(r.max_bits == 8 for r in rows)

    def test_deterministic_modulo_wall_time(self):
        first = rows_to_csv(run_experiment(self.CONFIG))
        second = rows_to_csv(run_experiment(self.CONFIG))
        assert strip_wall_ms(first) == strip_wall_ms(second)

    def test_worker_pool_matches_serial(self):
        from dataclasses import replace

        parallel = replace(self.CONFIG, workers=2)
        assert strip_wall_ms(rows_to_csv(run_experiment(parallel))) == strip_wall_ms(
            rows_to_csv(run_experiment(self.CONFIG))
        )

    def test_deterministic_protocol_cells_all_correct(self):
        config = ExperimentConfig(
            protocol="det",
            family="planted-junta:2",
            n_values=(3,),
            omegas=(Fraction(1, 4),),
            trials=5,
            base_seed=3,
        )
        rows = run_experiment(config)
        assert all(r.correct_frac == 1 for r in rows)

    def test_private_coin_far_cell_meets_soundness(self):
        config = ExperimentConfig(
            protocol="rand",
            family="uniform-random",
            n_values=(3,),
            omegas=(Fraction(1, 4),),
            trials=9,
            base_seed=5,
        )
        rows = run_experiment(config)
        far = next(r for r in rows if r.family.endswith("/far"))
        assert far.correct_frac >= Fraction(2, 3)
        near = next(r for r in rows if r.family.endswith("/near"))
        assert near.correct_frac == 1

    def test_impossible_far_cell_is_skipped(self, capsys):
        # a single-function family has an empty far region
        config = ExperimentConfig(
            protocol="public",
            family="parity",
            n_values=(2,),
            omegas=(Fraction(1, 4),),
            trials=2,
            base_seed=0,
        )
        rows = run_experiment(config)
        skipped = [r for r in rows if r.skipped]
        assert len(skipped) == 1
        assert "no far instance" in skipped[0].skipped
        assert "skipped" in rows_to_csv(rows)

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig("bogus", "uniform-random", (3,), (Fraction(1, 4),), 5)
        with pytest.raises(ValueError):
            ExperimentConfig(
                "rand", "uniform-random", (3,), (Fraction(1, 4),), 5,
                epsilon=Fraction(1, 8),
            )


class TestCliUtilities:
    def test_parse_fraction(self):
        assert parse_fraction("1/4") == Fraction(1, 4)
        assert parse_fraction("2") == Fraction(2)
        for bad in ("0.25", "1/0", "x"):
            with pytest.raises(Exception):
                parse_fraction(bad)

    def test_gen_norm_wht_canon_lindist(self, tmp_path, capsys):
        and2 = tmp_path / "and2.tt"
        chi_a = tmp_path / "a.tt"
        chi_b = tmp_path / "b.tt"
        assert main(["gen", "and-all", "2", "--out", str(and2)]) == 0
        assert main(["gen", "parity", "3", "--out", str(chi_a)]) == 0
        assert main(["gen", "parity", "3", "--alpha", "2", "--out", str(chi_b)]) == 0
        capsys.readouterr()

        assert main(["norm", str(and2), "--gamma", "1/3"]) == 0
        out = capsys.readouterr().out
        assert "spectral_norm = 2" in out
        assert "approx = 4/3" in out

        assert main(["wht", str(and2)]) == 0
        out = capsys.readouterr().out
        assert "(1,1) -> -1/2" in out

        assert main(["lindist", str(chi_a), str(chi_b)]) == 0
        out = capsys.readouterr().out
        assert "linear_distance = 0" in out

        canon_a = tmp_path / "ca.tt"
        canon_b = tmp_path / "cb.tt"
        assert main(["canon", str(chi_a), "--out", str(canon_a)]) == 0
        assert main(["canon", str(chi_b), "--out", str(canon_b)]) == 0
        assert canon_a.read_text() == canon_b.read_text()

    def test_parity_norm_is_one(self, tmp_path, capsys):
        path = tmp_path / "p.tt"
        main(["gen", "parity", "3", "--out", str(path)])
        capsys.readouterr()
        main(["norm", str(path)])
        assert "spectral_norm = 1" in capsys.readouterr().out

    def test_json_mode(self, tmp_path, capsys):
        path = tmp_path / "f.tt"
        main(["gen", "bent-ip", "4", "--out", str(path)])
        capsys.readouterr()
        assert main(["--json", "norm", str(path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["spectral_norm"] == "4"

    def test_run_protocols_in_memory(self, tmp_path, capsys):
        f = tmp_path / "f.tt"
        g = tmp_path / "g.tt"
        main(["gen", "parity", "3", "--out", str(f)])
        main(["gen", "parity", "3", "--alpha", "6", "--out", str(g)])
        capsys.readouterr()
        for cmd in ("run-det", "run-rand", "run-public"):
            assert main([cmd, "--f", str(f), "--g", str(g), "--omega", "1/4"]) == 0
            assert "outcome = accept" in capsys.readouterr().out

    def test_run_det_json_transcript(self, tmp_path, capsys):
        f = tmp_path / "f.tt"
        g = tmp_path / "g.tt"
        main(["--seed", "3", "gen", "uniform-random", "3", "--out", str(f)])
        main(["--seed", "3", "gen", "uniform-random", "3", "--out", str(g)])
        capsys.readouterr()
        assert main(["--json", "run-det", "--f", str(f), "--g", str(g),
                     "--omega", "1/4"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["outcome"] == "accept"
        assert payload["total_bits"] == payload["bits_a_to_b"] + payload["bits_b_to_a"]
        assert all(set(m) == {"dir", "len", "hex"} for m in payload["messages"])

    def test_phimap_and_reduce(self, capsys):
        assert main(["phimap", "--n", "1", "--ell", "2", "--omega", "1/4",
                     "--verify"]) == 0
        out = capsys.readouterr().out
        assert "->" in out and "verified" in out and "ok" in out

        assert main(["reduce-equ", "--n", "2", "--ell", "3", "--omega", "1/8",
                     "--a", "01", "--b", "01"]) == 0
        assert "EQUAL" in capsys.readouterr().out
        assert main(["reduce-equ", "--n", "2", "--ell", "3", "--omega", "1/8",
                     "--a", "01", "--b", "10", "--oracle", "public"]) == 0
        assert "DIFFERENT" in capsys.readouterr().out

    def test_error_paths(self, tmp_path, capsys):
        missing = tmp_path / "missing.tt"
        assert main(["norm", str(missing)]) == 2
        assert "error:" in capsys.readouterr().err
        bad = tmp_path / "bad.tt"
        bad.write_text("nonsense\n")
        assert main(["norm", str(bad)]) == 2


class TestCliSocket:
    def test_public_coin_over_tcp(self, tmp_path, capsys):
        import socket as socket_mod
        from concurrent.futures import ThreadPoolExecutor

        f = tmp_path / "f.tt"
        g = tmp_path / "g.tt"
        main(["gen", "parity", "3", "--out", str(f)])
        main(["gen", "parity", "3", "--alpha", "3", "--out", str(g)])
        capsys.readouterr()

        probe = socket_mod.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        address = f"127.0.0.1:{port}"

        with ThreadPoolExecutor(max_workers=1) as pool:
            listener = pool.submit(
                main, ["run-public", "--listen", address, "--g", str(g),
                       "--omega", "1/4"],
            )
            import time

            time.sleep(0.3)
            assert main(["run-public", "--connect", address, "--f", str(f),
                         "--omega", "1/4"]) == 0
            assert listener.result(timeout=15) == 0
        out = capsys.readouterr().out
        # parities are isomorphic: both sides print accept
        assert out.count("outcome = accept") == 2
        assert out.count("total_bits = 8") == 2


class TestCliExperiment:
    def test_experiment_writes_csv_and_figures(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        assert main([
            "experiment", "--protocol", "public", "--family", "uniform-random",
            "--n-list", "3", "--omega-list", "1/4", "--trials", "4",
            "--out", str(out),
        ]) == 0
        assert out.exists()
        text = out.read_text()
        assert text.splitlines()[0] == CSV_HEADER
        assert (tmp_path / "report_bits.png").exists()
        assert (tmp_path / "report_correctness.png").exists()

    def test_no_plots_flag(self, tmp_path, capsys):
        out = tmp_path / "plain.csv"
        assert main([
            "experiment", "--protocol", "rand", "--family", "planted-junta:2",
            "--n-list", "3", "--omega-list", "1/4", "--trials", "3",
            "--no-plots", "--out", str(out),
        ]) == 0
        assert out.exists()
        assert not (tmp_path / "plain_bits.png").exists()
        rows = out.read_text().splitlines()
        assert len(rows) == 3  # header + near + far
