"""Command-line behavior: exit statuses, CSV artifacts, resume."""

import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from lpns.cli import EXIT_BLOWUP, EXIT_OK, EXIT_USAGE, main

BASE = """
[grid]
n = 16

[physics]
nu = 0.1

[time]
dt = 0.005
t_end = {t_end}

[initial]
kind = "{kind}"
{extra}
[output]
directory = "{out}"
{output_extra}
"""


def write_cfg(tmp_path, name="run.toml", kind="taylor-green", t_end=0.02,
              extra="", output_extra="", out=None):
    out = out or (tmp_path / "out")
    p = tmp_path / name
    p.write_text(BASE.format(kind=kind, t_end=t_end, extra=extra,
                             output_extra=output_extra, out=out))
    return p, out


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestVerify:
    def test_partition_exit_zero(self, tmp_path, capsys):
        code = main(["verify", "--checks", "partition", "--n", "32",
                     "--out", str(tmp_path)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "partition" in out and "pass" in out
        assert (tmp_path / "checks.csv").exists()

    def test_all_checks_deterministic_csv(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["verify", "--seed", "42", "--n", "16", "--samples", "6",
                     "--out", str(a)]) == EXIT_OK
        assert main(["verify", "--seed", "42", "--n", "16", "--samples", "6",
                     "--out", str(b)]) == EXIT_OK
        assert (a / "checks.csv").read_bytes() == (b / "checks.csv").read_bytes()

    def test_unknown_check_usage_error(self, tmp_path, capsys):
        code = main(["verify", "--checks", "partitoin", "--out", str(tmp_path)])
        assert code == EXIT_USAGE
        assert "unknown check" in capsys.readouterr().err

    def test_selection_subset_runs_only_those(self, tmp_path):
        main(["verify", "--checks", "partition,gradient", "--n", "16",
              "--samples", "4", "--out", str(tmp_path)])
        rows = read_csv(tmp_path / "checks.csv")
        assert [r[0] for r in rows[1:]] == ["partition", "gradient"]


class TestSimulate:
    def test_beltrami_prints_closed_form_error(self, tmp_path, capsys):
        cfg, out = write_cfg(tmp_path, kind="beltrami", extra="lam = 2\n")
        assert main(["simulate", "--config", str(cfg)]) == EXIT_OK
        text = capsys.readouterr().out
        line = next(l for l in text.splitlines() if "closed-form error" in l)
        assert float(line.split()[-1]) < 1e-10
        rows = read_csv(out / "energy.csv")
        assert rows[0] == ["time", "l2_sq", "grad_sq", "l4"]
        assert len(rows) == 1 + 4 + 1  # header, initial, 4 steps

    def test_t_end_zero_single_row(self, tmp_path):
        cfg, out = write_cfg(tmp_path, t_end=0.0)
        assert main(["simulate", "--config", str(cfg)]) == EXIT_OK
        rows = read_csv(out / "energy.csv")
        assert len(rows) == 2
        assert float(rows[1][0]) == 0.0

    def test_malformed_config_exit_two(self, tmp_path, capsys):
        p = tmp_path / "bad.toml"
        p.write_text("[grid]\nn = 16\nwat = 3\n")
        assert main(["simulate", "--config", str(p)]) == EXIT_USAGE
        assert "wat" in capsys.readouterr().err

    def test_missing_config_exit_two(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "no.toml")]) == EXIT_USAGE

    def test_resume_bit_exact(self, tmp_path):
        # uninterrupted run to t=0.02 with checkpoints every step
        cfg_full, out_full = write_cfg(
            tmp_path, name="full.toml", t_end=0.02,
            output_extra="checkpoint_interval = 0.005\n",
            out=tmp_path / "full")
        assert main(["simulate", "--config", str(cfg_full)]) == EXIT_OK
        # first half, then resume from its final checkpoint
        cfg_half, out_half = write_cfg(
            tmp_path, name="half.toml", t_end=0.01,
            output_extra="checkpoint_interval = 0.005\n",
            out=tmp_path / "half")
        assert main(["simulate", "--config", str(cfg_half)]) == EXIT_OK
        ckpt = out_half / "checkpoint_00000002.lpns"
        assert ckpt.exists()
        cfg_rest, out_rest = write_cfg(
            tmp_path, name="rest.toml", kind="from-checkpoint", t_end=0.02,
            extra=f'path = "{ckpt}"\n',
            output_extra="checkpoint_interval = 0.005\n",
            out=tmp_path / "rest")
        assert main(["simulate", "--config", str(cfg_rest)]) == EXIT_OK
        final_full = (out_full / "checkpoint_00000004.lpns").read_bytes()
        final_rest = (out_rest / "checkpoint_00000002.lpns").read_bytes()
        assert final_full == final_rest

    @pytest.mark.filterwarnings("ignore::UserWarning")
    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_blowup_exit_three_with_partial_csv(self, tmp_path, capsys):
        # nearly inviscid, huge amplitude, absurd step: the quadratic
        # term feeds back on itself and overflows within a few steps
        cfg = tmp_path / "boom.toml"
        out = tmp_path / "out"
        cfg.write_text(
            "[grid]\nn = 16\n[physics]\nnu = 1e-4\n"
            "[time]\ndt = 0.5\nt_end = 5.0\n"
            "[initial]\nkind = \"taylor-green\"\namplitude = 1000.0\n"
            f"[output]\ndirectory = \"{out}\"\n")
        assert main(["simulate", "--config", str(cfg)]) == EXIT_BLOWUP
        assert "blow-up" in capsys.readouterr().out
        rows = read_csv(out / "energy.csv")
        assert len(rows) >= 2  # header plus at least the initial state
        assert all(math.isfinite(float(r[1])) for r in rows[1:])


class TestMonitor:
    def test_series_forced_without_config_section(self, tmp_path):
        cfg, out = write_cfg(tmp_path, t_end=0.01)
        assert main(["monitor", "--config", str(cfg)]) == EXIT_OK
        rows = read_csv(out / "series.csv")
        assert rows[0][0] == "time"
        assert "series_Bk_total" in rows[0]
        assert len(rows) >= 3

    def test_simulate_respects_cadence(self, tmp_path):
        cfg, out = write_cfg(
            tmp_path, t_end=0.02,
            extra="", output_extra="")
        body = cfg.read_text() + (
            "\n[series]\nk0 = 10\nk_grid = [10, 12, 14]\ncadence = 0.01\n")
        cfg.write_text(body)
        assert main(["simulate", "--config", str(cfg)]) == EXIT_OK
        rows = read_csv(out / "series.csv")
        # initial, t=0.01, t=0.02
        assert [float(r[0]) for r in rows[1:]] == [0.0, 0.01, 0.02]


class TestBarrier:
    def test_zero_start_flat(self, tmp_path, capsys):
        code = main(["barrier", "--epsilon", "0", "--script-b", "1.0",
                     "--m-power", "5", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "conclusion-holds" in capsys.readouterr().out
        rows = read_csv(tmp_path / "barrier.csv")
        values = [float(r[1]) for r in rows[1:]]
        assert max(values) == 0.0

    def test_small_start_passes(self, tmp_path, capsys):
        code = main(["barrier", "--epsilon", "0.05", "--script-b", "1.0",
                     "--m-power", "5", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "conclusion-holds" in capsys.readouterr().out

    def test_m_one_rejected(self, tmp_path, capsys):
        code = main(["barrier", "--epsilon", "0.05", "--script-b", "1.0",
                     "--m-power", "1.0", "--out", str(tmp_path)])
        assert code == EXIT_USAGE
        assert "exceed 1" in capsys.readouterr().err


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "lpns", "verify", "--checks", "partition",
             "--n", "16", "--out", str(tmp_path)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "partition" in proc.stdout
