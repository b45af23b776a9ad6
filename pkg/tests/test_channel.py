import numpy as np
import pytest

from lteturbo.channel import (ChannelConfig, awgn, block_rng, bpsk_modulate,
                              llr_demap, serialize_codeword, split_llrs,
                              transmit)
from lteturbo.qpp import params_for_block_size
from lteturbo.trellis import turbo_encode


class TestModulation:
    def test_mapping(self):
        assert bpsk_modulate([0]).tolist() == [1.0]
        assert bpsk_modulate([1]).tolist() == [-1.0]
        assert bpsk_modulate([0, 1, 0]).tolist() == [1.0, -1.0, 1.0]


class TestChannelConfig:
    def test_noise_variance_formula(self):
        # sigma^2 = 1 / (2 R 10^(EbN0/10)); R=1/3 at 0 dB gives 1.5
        cfg = ChannelConfig(ebn0_db=0.0, code_rate=1.0 / 3.0)
        assert cfg.noise_variance == pytest.approx(1.5)

    def test_tail_adjusted_rate(self):
        cfg = ChannelConfig.for_block_size(40, 1.0)
        assert cfg.code_rate == pytest.approx(40 / 132)

    def test_rate_validation(self):
        with pytest.raises(ValueError):
            ChannelConfig(ebn0_db=0.0, code_rate=0.0)


class TestAwgn:
    def test_vanishing_noise(self):
        symbols = bpsk_modulate(np.tile([0, 1], 50))
        received = awgn(symbols, 1e-12, seed=1)
        assert np.abs(received - symbols).max() < 1e-5

    def test_seed_determinism(self):
        symbols = np.zeros(1000)
        assert np.array_equal(awgn(symbols, 1.0, seed=2), awgn(symbols, 1.0, seed=2))

    def test_moments(self):
        noise = awgn(np.zeros(10**6), 1.0, seed=3)
        assert abs(noise.mean()) < 0.01
        assert 0.99 <= noise.var() <= 1.01

    def test_variance_scaling(self):
        noise = awgn(np.zeros(10**6), 0.25, seed=4)
        assert 0.99 * 0.25 <= noise.var() <= 1.01 * 0.25

    def test_rejects_bad_variance(self):
        with pytest.raises(ValueError):
            awgn(np.zeros(4), 0.0, seed=0)

    def test_generator_passthrough(self):
        rng = block_rng(7, 0)
        a = awgn(np.zeros(16), 1.0, rng)
        b = awgn(np.zeros(16), 1.0, block_rng(7, 0))
        assert np.array_equal(a, b)


class TestDemap:
    def test_spot_values(self):
        assert llr_demap(1.0, 1.0) == 2.0
        assert llr_demap(0.0, 0.123) == 0.0
        assert llr_demap(-0.5, 0.5) == -2.0

    def test_rejects_bad_variance(self):
        with pytest.raises(ValueError):
            llr_demap(np.zeros(4), -1.0)

    def test_noiseless_round_trip(self):
        rng = np.random.default_rng(5)
        bits = rng.integers(0, 2, 200)
        llrs = llr_demap(bpsk_modulate(bits), 1.0)
        assert np.array_equal((llrs < 0).astype(int), bits)


class TestBlockRng:
    def test_streams_are_independent_of_each_other(self):
        a = block_rng(1, 0).standard_normal(8)
        b = block_rng(1, 1).standard_normal(8)
        assert not np.array_equal(a, b)

    def test_streams_are_reproducible(self):
        assert np.array_equal(block_rng(9, 4).standard_normal(8),
                              block_rng(9, 4).standard_normal(8))


class TestSerialization:
    def test_split_inverts_serialize(self):
        qpp = params_for_block_size(40)
        rng = np.random.default_rng(6)
        cw = turbo_encode(rng.integers(0, 2, 40, dtype=np.uint8), qpp)
        flat = serialize_codeword(cw)
        assert flat.shape == (132,)
        ch = split_llrs(llr_demap(bpsk_modulate(flat), 2.0), 40)
        assert np.array_equal((ch.lu < 0).astype(np.uint8), cw.systematic)
        assert np.array_equal((ch.parity2 < 0).astype(np.uint8), cw.parity2)
        assert np.array_equal((ch.tail2_parity < 0).astype(np.uint8),
                              cw.tail.enc2_parity)

    def test_split_length_check(self):
        with pytest.raises(ValueError):
            split_llrs(np.zeros(100), 40)

    def test_transmit_shapes(self):
        qpp = params_for_block_size(40)
        cw = turbo_encode(np.zeros(40, dtype=np.uint8), qpp)
        ch = transmit(cw, 1.0, seed=7)
        assert ch.n == 40
        assert ch.lu.shape == (40,) and ch.tail1_info.shape == (3,)
