import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gedsense.errors import DegenerateInputError, DegeneratePlanError, DomainError
from gedsense.spectral import (
    BandConfig,
    SampleBuffer,
    plan_for_samples,
    plan_subbands,
    sidecar_path,
    subband_energies,
    unitary_dft,
    window_energies,
)

from oracles import dft_direct


def test_plan_tiny_window():
    plan = plan_subbands(BandConfig(6e6, 2e6), 1e-6)
    assert (plan.n_samples, plan.n_target_bins, plan.n_white_bins) == (8, 6, 2)
    assert plan.beta == pytest.approx(1 / 3)


def test_plan_tv_band():
    plan = plan_subbands(BandConfig(6e6, 6e6), 30.3e-3)
    assert plan.n_samples == 363600
    assert plan.n_target_bins == 181800
    assert plan.beta == 1.0


def test_plan_degenerate():
    with pytest.raises(DegeneratePlanError):
        plan_subbands(BandConfig(1e3, 1e6), 1e-6)  # N_s = 1, N_dk = 0
    with pytest.raises(DegeneratePlanError):
        plan_for_samples(BandConfig(1e6, 1e6), 1)


def test_band_validation():
    with pytest.raises(DomainError):
        BandConfig(0.0, 1e6)
    with pytest.raises(DomainError):
        plan_subbands(BandConfig(1e6, 1e6), 0.0)


@given(st.integers(2, 5000), st.floats(0.05, 0.95))
def test_bin_partition(n, frac):
    band = BandConfig(frac, 1 - frac)
    try:
        plan = plan_for_samples(band, n)
    except DegeneratePlanError:
        return
    assert plan.n_target_bins + plan.n_white_bins == n
    assert plan.n_target_bins == int(np.floor(frac * n * (1 + 1e-9)))


@given(st.integers(2, 3000), st.floats(0.05, 0.95))
def test_centered_plan_covers_every_bin_once(n, frac):
    try:
        plan = plan_for_samples(BandConfig(frac, 1 - frac), n, "centered")
    except DegeneratePlanError:
        return
    idx = np.sort(np.concatenate([plan.target_index(), plan.white_index()]))
    assert np.array_equal(idx, np.arange(n))
    assert 0 in plan.target_index()


def test_dft_examples():
    assert np.allclose(unitary_dft(np.ones(4)), [2, 0, 0, 0])
    x = np.zeros(9, dtype=complex)
    x[1] = 1.0
    assert np.allclose(np.abs(unitary_dft(x)), 1 / 3)
    with pytest.raises(DomainError):
        unitary_dft(np.array([]))


@pytest.mark.parametrize("n", [1, 7, 12, 101, 360])
def test_dft_matches_direct_definition(n):
    rng = np.random.default_rng(n)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert np.allclose(unitary_dft(x), dft_direct(x), rtol=0, atol=1e-11)


complex_arrays = arrays(
    np.complex128,
    st.integers(1, 400),
    elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
)


@given(complex_arrays)
def test_parseval(x):
    e_time = np.sum(np.abs(x) ** 2)
    e_bins = np.sum(np.abs(unitary_dft(x)) ** 2)
    assert abs(e_time - e_bins) <= 1e-10 * max(e_time, 1e-300)


def test_energies_examples():
    plan = plan_for_samples(BandConfig(3, 1), 8)
    e = subband_energies(np.ones(8), plan)
    assert (e.target, e.white) == (1.0, 1.0)
    bins = np.ones(8, dtype=complex)
    bins[: plan.n_target_bins] = 2j
    e = subband_energies(bins, plan)
    assert (e.target, e.white) == (4.0, 1.0)


def test_energies_zero_white_band():
    plan = plan_for_samples(BandConfig(1, 1), 8)
    bins = np.zeros(8)
    bins[:4] = 1
    with pytest.raises(DegenerateInputError):
        subband_energies(bins, plan)
    with pytest.raises(DomainError):
        subband_energies(np.ones(7), plan)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
def test_energy_scaling(seed, c):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    plan = plan_for_samples(BandConfig(5, 3), 64)
    buf = SampleBuffer(x, 8.0)
    e1 = window_energies(buf, plan)
    e2 = window_energies(SampleBuffer(c * x, 8.0), plan)
    k = abs(c) ** 2
    assert e2.target == pytest.approx(k * e1.target, rel=1e-12)
    assert e2.white == pytest.approx(k * e1.white, rel=1e-12)


def test_white_noise_energies_converge():
    # |bin|^2 of unit CSCG noise is Exp(1): the band means have std 1/sqrt(N)
    sigma2 = 3.0
    n = 200_000
    rng = np.random.default_rng(11)
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(sigma2 / 2)
    plan = plan_for_samples(BandConfig(1, 1), n)
    e = window_energies(SampleBuffer(x, 1.0), plan)
    for m, count in ((e.target, plan.n_target_bins), (e.white, plan.n_white_bins)):
        assert abs(m - sigma2) <= 3 * sigma2 / np.sqrt(count)


def test_sample_file_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    buf = SampleBuffer(rng.standard_normal(33) + 1j * rng.standard_normal(33), 12e6)
    meta = buf.save(tmp_path / "w.bin")
    assert meta == sidecar_path(tmp_path / "w.bin")
    assert json.loads(meta.read_text()) == {"sample_rate": 12e6, "length": 33}
    raw = np.frombuffer((tmp_path / "w.bin").read_bytes(), dtype="<f8")
    assert raw[0] == buf.samples[0].real and raw[1] == buf.samples[0].imag
    back = SampleBuffer.load(tmp_path / "w.bin")
    assert np.array_equal(back.samples, buf.samples) and back.sample_rate == 12e6


def test_sample_file_truncated(tmp_path):
    buf = SampleBuffer(np.ones(10), 1.0)
    buf.save(tmp_path / "w.bin")
    data = (tmp_path / "w.bin").read_bytes()
    (tmp_path / "w.bin").write_bytes(data[:-8])
    with pytest.raises(ValueError):
        SampleBuffer.load(tmp_path / "w.bin")
