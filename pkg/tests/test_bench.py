"""Tests for the timing harness and its chart."""
import io

import matplotlib
import matplotlib.pyplot as plt
import pandas as pd
import pytest

from src import cli
from src.bench import CSV_COLUMNS, make_bench_cover, run_bench, summary_table, to_csv
from src.cli import EXIT_OK, main
from src.errors import ConfigError
from src.plotting import create_timing_chart, save_timing_chart


@pytest.fixture(scope="module")
def small_results():
    return run_bench([2048, 8192], modes=["hybrid", "rsa-direct", "des-only"], repetitions=2, k=2, seed=1)


def test_result_shape(small_results):
    """Test one row per (size, mode, repetition, phase)."""
    assert len(small_results) == 2 * 3 * 2 * 6
    phases = set(small_results["phase"])
    assert phases == {"encrypt", "embed", "extract", "decrypt", "crypto", "total"}
    assert (small_results["seconds"] >= 0).all()
    counts = small_results.groupby(["size_bytes", "mode", "phase"]).size()
    assert (counts == 2).all()


def test_crypto_phase_is_sum(small_results):
    """Test that crypto equals encrypt + decrypt for every run."""
    wide = small_results.pivot_table(
        index=["size_bytes", "mode", "repetition"], columns="phase", values="seconds"
    )
    assert ((wide["encrypt"] + wide["decrypt"] - wide["crypto"]).abs() < 1e-12).all()


def test_des_cipher_is_much_faster_than_direct_rsa(small_results):
    """Test that DES cipher time is at most a tenth of direct RSA at each size."""
    crypto = small_results[small_results["phase"] == "crypto"]
    means = crypto.groupby(["size_bytes", "mode"])["seconds"].mean().unstack("mode")
    assert (means["des-only"] <= means["rsa-direct"] / 10).all()


def test_csv_output(small_results):
    """Test the CSV header and row count."""
    text = to_csv(small_results)
    assert text.splitlines()[0] == "size_bytes,mode,phase,seconds"
    parsed = pd.read_csv(io.StringIO(text))
    assert list(parsed.columns) == CSV_COLUMNS
    assert len(parsed) == len(small_results)


def test_summary_table(small_results):
    """Test that the summary lists every mode."""
    table = summary_table(small_results)
    for mode in ("hybrid", "rsa-direct", "des-only"):
        assert mode in table


def test_timing_chart(small_results):
    """Test one plotted line per mode."""
    fig = create_timing_chart(small_results, phase="crypto")
    assert len(fig.axes[0].get_lines()) == 3
    assert "crypto" in fig.axes[0].get_title()
    plt.close(fig)


def test_save_timing_chart_closes_figure(small_results, tmp_path):
    """Test that saving the chart writes a PNG and leaves no open figure."""
    before = len(plt.get_fignums())
    save_timing_chart(small_results, tmp_path / "chart.png")
    assert (tmp_path / "chart.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(plt.get_fignums()) == before


def test_cli_leaves_backend_to_plotting():
    """Test that the CLI draws through the plotting module on the Agg backend."""
    assert not hasattr(cli, "plt")
    assert matplotlib.get_backend().lower() == "agg"


def test_bench_cover_fits_direct_rsa():
    """Test that the generated cover holds the largest ciphertext."""
    cover = make_bench_cover(10_000, 1)
    assert (cover.carrier_count - 192) // 8 >= 10_000 * 64 // 63 + 8


def test_bench_argument_checks():
    """Test invalid sizes, modes and repetitions."""
    with pytest.raises(ConfigError):
        run_bench([0])
    with pytest.raises(ConfigError):
        run_bench([10], modes=["aes"])
    with pytest.raises(ConfigError):
        run_bench([10], repetitions=0)


def test_bench_command(tmp_path, capsys):
    """Test the bench subcommand writing CSV and a chart."""
    csv_path = tmp_path / "bench.csv"
    plot_path = tmp_path / "bench.png"
    assert main([
        "bench", "--sizes", "512", "--modes", "des-only", "rsa-direct",
        "--repetitions", "1", "--csv", str(csv_path), "--plot", str(plot_path),
    ]) == EXIT_OK
    assert len(pd.read_csv(csv_path)) == 1 * 2 * 6
    assert plot_path.stat().st_size > 0
    assert "des-only" in capsys.readouterr().out


@pytest.mark.slow
def test_acceptance_sizes():
    """Test that DES wall time is a tenth of direct RSA at 100 KiB and 843 KiB."""
    results = run_bench([102400, 863232], modes=["rsa-direct", "des-only"], repetitions=3, k=2)
    total = results[results["phase"] == "total"]
    fastest = total.groupby(["size_bytes", "mode"])["seconds"].min().unstack("mode")
    assert (fastest["des-only"] <= fastest["rsa-direct"] / 10).all()
    growth = fastest.loc[863232, "des-only"] / fastest.loc[102400, "des-only"]
    assert 4 <= growth <= 20
