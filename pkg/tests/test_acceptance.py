"""
Acceptance criteria.  Each test carries ``@pytest.mark.acceptance(N)`` and
the conftest prints one PASS/FAIL line per criterion at the end of the run.

Criterion 6 needs the two monthly close-price files described in the
README (``HPFILT_SP500_CSV`` / ``HPFILT_SHCI_CSV`` or ``tests/data/``).
"""
import os
import time
from pathlib import Path

import numpy as np
import pytest

from hpfilt import bench, filters, linalg
from hpfilt import io as hpio

import oracles

acceptance = pytest.mark.acceptance
DATA_DIR = Path(__file__).parent / "data"


def _max_rel(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


@acceptance(1, title="incremental trend == hp_direct on 100 random series (1e-8, < 10 s)")
def test_oracle_equivalence():
    rng = np.random.default_rng(1001)
    etas = (1.0, 1600.0, 14400.0)
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(100):
        l = int(rng.integers(3, 201))
        eta = etas[k % 3]
        y = rng.standard_normal(l)
        ref = filters.hp_direct(y, eta).trend
        fast = filters.hp_incremental(y, eta).trend
        stepped = filters.incr_init(*y[:3], eta, track_inverse=False).extend(y[3:])
        worst = max(worst, _max_rel(fast, ref), _max_rel(stepped.trend, ref))
    elapsed = time.perf_counter() - t0
    print(f"criterion 1: worst relative error {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-8
    assert elapsed < 10.0


@acceptance(2, title="closed-form S_3^{-1} inverts S_3 (1e-10)")
@pytest.mark.parametrize("eta", [0.0, 1.0, 1600.0, 14400.0])
def test_closed_form_seed(eta):
    prod = linalg.s3_inverse(eta).inverse @ linalg.penalty_matrix(3, eta)
    assert np.max(np.abs(prod - np.eye(3))) <= 1e-10


def _trend_maps():
    return {
        "hp": lambda y, eta: filters.hp_direct(y, eta),
        "bhp": lambda y, eta: filters.bhp(y, eta, 3),
        "ohp": lambda y, eta: filters.Decomposition.from_trend(y, filters.ohp(y, eta)),
        "sohp": lambda y, eta: filters.Decomposition.from_trend(
            y, np.sum(filters.sohp_stages(y, eta, 4)[0], axis=0)),
    }


@acceptance(3, title="affine passthrough, shift, linearity, c == y - g (>= 50 instances)")
@pytest.mark.parametrize("name", ["hp", "bhp", "ohp", "sohp"])
def test_analytic_invariances(name):
    f = _trend_maps()[name]
    rng = np.random.default_rng({"hp": 31, "bhp": 32, "ohp": 33, "sohp": 34}[name])
    etas = (1.0, 1600.0, 14400.0)
    for k in range(50):
        l = int(rng.integers(3, 201))
        eta = etas[k % 3]
        t = np.arange(l, dtype=float)

        # affine passthrough
        ya = rng.uniform(-10, 10) + rng.uniform(-1, 1) * t
        d = f(ya, eta)
        assert np.max(np.abs(d.trend - ya)) <= 1e-10
        assert np.max(np.abs(d.cycle)) <= 1e-10

        # shift equivariance
        y = rng.standard_normal(l)
        shift = rng.uniform(-100, 100)
        base = f(y, eta).trend
        assert np.max(np.abs(f(y + shift, eta).trend - (base + shift))) <= \
            1e-9 * max(1.0, np.max(np.abs(y + shift)))

        # linearity
        z = rng.standard_normal(l)
        a, b = rng.uniform(-5, 5, size=2)
        lhs = f(a * y + b * z, eta).trend
        rhs = a * base + b * f(z, eta).trend
        assert _max_rel(lhs, rhs) <= 1e-9

        # decomposition identity: cycle is exactly y - trend
        np.testing.assert_array_equal(d.cycle, ya - d.trend)
        d = f(y, eta)
        np.testing.assert_array_equal(d.cycle, y - d.trend)
        assert np.max(np.abs(d.trend + d.cycle - y)) <= \
            np.spacing(max(np.max(np.abs(y)), np.max(np.abs(d.trend))))


@acceptance(4, title="OHP point t == end of hp_direct on y[:t], l = 100 (1e-9)")
def test_ohp_prefix_identity():
    y = np.random.default_rng(4).standard_normal(100)
    one_sided = filters.ohp(y, 14400)
    for t in range(3, 101):
        assert abs(one_sided[t - 1] - filters.hp_direct(y[:t], 14400).trend[-1]) <= 1e-9


@acceptance(5, title="bHP n=3 == dense (I - S^-1)^3 y (1e-8); n=1 bit-identical to HP")
def test_bhp_oracle():
    y = np.random.default_rng(5).standard_normal(15)
    d = filters.bhp(y, 1600, 3)
    expected = oracles.bhp_cycle(y, 1600, 3)
    assert np.max(np.abs(d.cycle - expected)) <= 1e-8
    assert np.max(np.abs(d.trend - (y - expected))) <= 1e-8
    one = filters.bhp(y, 1600, 1)
    hp = filters.hp_direct(y, 1600)
    assert np.array_equal(one.trend, hp.trend) and np.array_equal(one.cycle, hp.cycle)


# (name, env var, file, observations, n, SI, mean, variance)
TABLE = [
    ("S&P 500", "HPFILT_SP500_CSV", "sp500_monthly.csv", 885, 4, 0.8684, 2.40e-4, 2.70e-3),
    ("SHCI", "HPFILT_SHCI_CSV", "shci_monthly.csv", 279, 3, 0.9659, -5.01e-5, 1.75e-2),
]


def _dataset_path(env, filename):
    raw = os.environ.get(env)
    return Path(raw) if raw else DATA_DIR / filename


def _same_magnitude(value, reference):
    return np.sign(value) == np.sign(reference) and \
        abs(np.log10(abs(value) / abs(reference))) < 1.0


def _unimodal_to_min(values):
    k = int(np.argmin(values))
    down = all(b < a for a, b in zip(values[:k + 1], values[1:k + 1]))
    up = all(b > a for a, b in zip(values[k:], values[k + 1:]))
    return down and up


@acceptance(6, title="reference results: S&P 500 n=4 SI~0.8684, SHCI n=3 SI~0.9659 (<= 5 min)")
@pytest.mark.parametrize("row", TABLE, ids=[r[0] for r in TABLE])
def test_table_one(row):
    name, env, filename, nobs, n_ref, si_ref, mean_ref, var_ref = row
    path = _dataset_path(env, filename)
    if not path.exists():
        pytest.fail(f"{name} monthly close series not available at {path} "
                    f"(set {env}); this criterion cannot be evaluated without it")
    t0 = time.perf_counter()
    records = hpio.read_csv(path)
    y = hpio.log_transform(records)
    result = filters.sohp(y, 14400.0)
    elapsed = time.perf_counter() - t0
    m = filters.cycle_moments(result.final_cycle)
    si = result.si_values[result.chosen_n - 1]
    print(f"{name}: l={y.size} n={result.chosen_n} SI={si:.4f} mean={m['mean']:.3e} "
          f"var={m['variance_population']:.3e}/{m['variance_sample']:.3e} "
          f"({elapsed:.1f} s)")
    assert y.size == nobs
    assert _unimodal_to_min(result.si_values)
    assert result.chosen_n == n_ref
    assert abs(si - si_ref) <= 0.05
    assert _same_magnitude(m["mean"], mean_ref)
    assert (_same_magnitude(m["variance_population"], var_ref)
            or _same_magnitude(m["variance_sample"], var_ref))
    assert elapsed <= 300


@acceptance(7, title="bench slopes: incremental in [1.6, 2.6], dense in [2.4, 3.4], "
                     "incremental faster at 2000 (<= 3 min)")
def test_complexity():
    t0 = time.perf_counter()
    rep = bench.run_bench([250, 500, 1000, 2000], repeats=10)
    elapsed = time.perf_counter() - t0
    print(f"criterion 7: direct slope {rep.direct_slope:.3f}, incremental slope "
          f"{rep.incremental_slope:.3f}, at 2000: {rep.direct_seconds[-1]:.4f} s vs "
          f"{rep.incremental_seconds[-1]:.4f} s ({elapsed:.1f} s total)")
    assert 1.6 <= rep.incremental_slope <= 2.6
    assert 2.4 <= rep.direct_slope <= 3.4
    assert rep.incremental_seconds[-1] < rep.direct_seconds[-1]
    assert elapsed <= 180


@acceptance(8, title="eigenvalue traces == dense matrix powers, l = 10 (1e-9)")
@pytest.mark.parametrize("n", [1, 2, 3])
def test_trace_cache(n):
    cache = filters.build_trace_cache(10, 1600)
    for t in range(3, 11):
        assert abs(cache.power_trace(t, n) - oracles.power_trace(t, 1600, n)) <= 1e-9


def test_unimodal_helper():
    assert _unimodal_to_min([3, 2, 1, 2, 3])
    assert _unimodal_to_min([1, 2, 3])
    assert _unimodal_to_min([3, 2, 1])
    assert not _unimodal_to_min([3, 1, 2, 1.5])
    assert not _unimodal_to_min([3, 2, 2, 3])


def test_same_magnitude_helper():
    assert _same_magnitude(2.0e-4, 2.4e-4)
    assert not _same_magnitude(-2.0e-4, 2.4e-4)
    assert not _same_magnitude(2.0e-2, 2.4e-4)
