import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quartersample import mask as M
from quartersample import sensor as S
from quartersample.recon import FseConfig, psnr, reconstruct_fse, reconstruct_fse_reference
from quartersample.recon import _kernel
from quartersample.recon.fse import decay_window, extrapolate_block

SMALL = FseConfig(fft_size=16, block_size=4, iterations=40)


def sinusoid(size=64, period=8, phase=0.3, slope=0):
    m, n = np.mgrid[0:size, 0:size]
    return 127.5 + 100.0 * np.cos(2 * np.pi * (slope * m + n) / period + phase)


class TestConfig:
    def test_defaults(self):
        cfg = FseConfig()
        assert (cfg.fft_size, cfg.block_size, cfg.border) == (32, 4, 14)

    @pytest.mark.parametrize("kwargs", [
        dict(fft_size=24), dict(fft_size=8, block_size=6), dict(fft_size=16, block_size=3),
        dict(iterations=0), dict(decay=1.0), dict(decay=0.0), dict(compensation=0.0),
        dict(compensation=1.5), dict(confidence=-0.1), dict(block_size=0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            FseConfig(**kwargs)

    def test_from_file(self, tmp_path):
        path = tmp_path / "fse.cfg"
        path.write_text("# tuned\nfft_size = 16\ndecay = 0.8\nfeedback = false\n")
        cfg = FseConfig.from_file(path)
        assert cfg == FseConfig(fft_size=16, decay=0.8, feedback=False)

    @pytest.mark.parametrize("text", ["bogus = 1\n", "iterations = x\n", "feedback = maybe\n",
                                      "decay 0.5\n", "decay = 0.5\ndecay = 0.6\n"])
    def test_bad_file(self, tmp_path, text):
        path = tmp_path / "fse.cfg"
        path.write_text(text)
        with pytest.raises(ValueError):
            FseConfig.from_file(path)

    def test_decay_window_symmetric(self):
        w = decay_window(FseConfig(fft_size=8, block_size=2, decay=0.5))
        assert np.allclose(w, w[::-1, ::-1]) and np.allclose(w, w.T)
        assert w[3, 3] == pytest.approx(0.5 ** np.hypot(0.5, 0.5))


@pytest.mark.parametrize("size", [1, 2, 4, 8, 32])
def test_own_fft_matches_numpy(size, rng):
    x = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    re, im = x.real.copy(), x.imag.copy()
    _kernel.fft2_inplace(re, im, *_kernel.fft_tables(size))
    assert np.allclose(re + 1j * im, np.fft.fft2(x), atol=1e-9 * max(1, size * size))


def test_constant_image():
    hr = np.full((48, 40), 93.0)
    masked = S.acquire_masked(hr, M.generate_full_sensor_mask(48, 40, 1))
    out = reconstruct_fse(masked).image
    assert np.max(np.abs(out - hr)) < 1e-6


@given(st.integers(0, 2**32), st.sampled_from([2, 4, 8, "max"]))
@settings(max_examples=15)
def test_known_pixels_bit_exact(seed, b):
    rng = np.random.default_rng(seed)
    hr = rng.uniform(0, 255, size=(24, 20))
    if b == "max":
        mask = M.generate_full_sensor_mask(24, 20, seed)
    else:
        mask = M.tile(M.generate_template(b, seed), 24, 20)
    out = reconstruct_fse(S.acquire_masked(hr, mask), SMALL).image
    assert np.array_equal(out[mask.bits], hr[mask.bits])
    assert np.all(np.isfinite(out))
    assert out.min() >= 0 and out.max() <= 255


@pytest.mark.parametrize("seed", range(10))
def test_sinusoid_recovered(seed):
    hr = sinusoid()
    masked = S.acquire_masked(hr, M.generate_full_sensor_mask(64, 64, seed))
    assert psnr(hr, reconstruct_fse(masked).image) > 40.0


@pytest.mark.xfail(strict=True, reason="corner blocks see a quarter of their support; "
                   "an oblique wave is mis-fitted there for some masks")
def test_oblique_sinusoid_all_seeds():
    hr = sinusoid(period=4, slope=0.5)
    worst = min(psnr(hr, reconstruct_fse(S.acquire_masked(
        hr, M.generate_full_sensor_mask(64, 64, seed))).image) for seed in range(20))
    assert worst > 40.0


def test_regular_mask_without_feedback_is_smooth():
    # aliases tie exactly under a regular mask; the lowest frequency must win
    m, n = np.mgrid[0:48, 0:48]
    hr = 127 + 60 * np.sin(m / 9.0) * np.cos(n / 7.0)
    masked = S.acquire_masked(hr, M.regular_mask(48, 48))
    cfg = FseConfig(feedback=False, iterations=100)
    assert psnr(hr, reconstruct_fse(masked, cfg).image) > 55.0
    assert psnr(hr, reconstruct_fse_reference(masked, cfg).image) > 55.0


def test_odd_multiple_of_block(rng):
    hr = rng.uniform(0, 255, size=(22, 18))
    mask = M.generate_full_sensor_mask(22, 18, 2)
    out = reconstruct_fse(S.acquire_masked(hr, mask), SMALL)
    assert out.image.shape == (22, 18)
    assert len(out.per_block_iterations) == 6 * 5


def test_non_finite_rejected():
    mask = M.regular_mask(8, 8)
    masked = S.acquire_masked(np.zeros((8, 8)), mask)
    bad = masked.image.copy()
    bad[0, 0] = np.nan
    object.__setattr__(masked, "image", bad)
    with pytest.raises(ValueError):
        reconstruct_fse(masked, FseConfig(fft_size=8, block_size=2))


@pytest.mark.parametrize("cfg", [
    SMALL,
    FseConfig(fft_size=16, block_size=2, iterations=25, feedback=False),
    FseConfig(fft_size=8, block_size=4, iterations=10, compensation=1.0),
])
def test_compiled_matches_reference(cfg, camera):
    hr = camera[100:124, 300:332]
    mask = M.generate_full_sensor_mask(24, 32, 4)
    masked = S.acquire_masked(hr, mask)
    fast = reconstruct_fse(masked, cfg)
    slow = reconstruct_fse_reference(masked, cfg)
    assert np.allclose(fast.image, slow.image, atol=1e-6)
    assert np.array_equal(fast.per_block_iterations, slow.per_block_iterations)


def test_energy_non_increasing(camera, rng):
    cfg = FseConfig()
    w = decay_window(cfg)
    for _ in range(10):
        r0, c0 = rng.integers(0, camera.shape[0] - 32, size=2)
        window = camera[r0:r0 + 32, c0:c0 + 32]
        bits = M.generate_full_sensor_mask(32, 32, int(r0)).bits
        _, energies = extrapolate_block(window, w * bits, 100, cfg.compensation)
        assert np.all(np.diff(energies) <= 1e-9 * energies[0])
        assert energies[-1] < energies[0]


def test_reference_energy_log():
    hr = sinusoid(16, 4, slope=1)
    log = []
    reconstruct_fse_reference(S.acquire_masked(hr, M.generate_full_sensor_mask(16, 16, 0)),
                              FseConfig(fft_size=8, block_size=4, iterations=20), log)
    assert len(log) == 16
    for energies in log:
        assert np.all(np.diff(energies) <= 1e-9 * max(energies[0], 1.0))


def test_empty_window_leaves_zero_iterations():
    # a block whose whole support is unknown runs no iterations
    hr = np.full((4, 4), 50.0)
    out = extrapolate_block(hr, np.zeros((4, 4)), 10, 0.5)
    assert np.all(out[0] == 0) and len(out[1]) == 1
