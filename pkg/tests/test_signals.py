import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jfrft.errors import ParseError, ShapeMismatch
from jfrft.signals import (
    BandSpec,
    NoiseSpec,
    SyntheticSpec,
    TimeVertexSignal,
    blockify,
    gen_bandlimited,
    gen_highfreq_noise,
    highfreq_support,
    load_timeseries_csv,
    make_rng,
    unblockify,
    write_timeseries_csv,
)
from jfrft.transform import JointTransform

from conftest import graph_op_for


@pytest.fixture
def jt66():
    from jfrft.fracops import make_time_fracop

    return JointTransform(0.55, 0.45, graph_op_for(6, 0), make_time_fracop(6))


def test_signal_layout():
    x = TimeVertexSignal(np.arange(12.0).reshape(2, 6), 3)
    assert (x.n, x.m, x.t) == (2, 2, 3)
    np.testing.assert_array_equal(x.block(1), [[3, 4, 5], [9, 10, 11]])
    np.testing.assert_array_equal(TimeVertexSignal.from_blocks(x.blocks()).data, x.data)
    with pytest.raises(ShapeMismatch):
        TimeVertexSignal(np.zeros((2, 5)), 3)


def test_blockify_examples():
    a, b, c, d = 1.0, 2.0, 3.0, 4.0
    x = TimeVertexSignal(np.array([[a, c], [b, d]]), 2)
    vecs = blockify(x)
    assert len(vecs) == 1
    np.testing.assert_array_equal(vecs[0], [a, b, c, d])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(1, 4))
def test_blockify_round_trip(n, t, m):
    data = make_rng(n * 100 + t * 10 + m).standard_normal((n, m * t))
    x = TimeVertexSignal(data, t)
    np.testing.assert_array_equal(unblockify(blockify(x), n, t).data, data)


@pytest.mark.parametrize("k,l", [(6, 6), (1, 1), (4, 4), (2, 5)])
def test_bandlimited_support(jt66, k, l):
    x = gen_bandlimited(jt66, BandSpec(k, l), 3, seed=7)
    coeffs = jt66.forward(x.blocks())
    nonzero = np.abs(coeffs) > 1e-12
    assert nonzero.sum() == k * l * 3
    assert not nonzero[:, k:, :].any() and not nonzero[:, :, l:].any()
    if (k, l) == (1, 1):
        assert all(np.linalg.matrix_rank(c) == 1 for c in coeffs)


def test_bandlimited_reproducible(jt66):
    a = gen_bandlimited(jt66, BandSpec(4, 4), 2, seed=3)
    b = gen_bandlimited(jt66, BandSpec(4, 4), 2, seed=3)
    np.testing.assert_array_equal(a.data, b.data)


def test_band_validation():
    with pytest.raises(ValueError):
        BandSpec(0, 2).validate(4, 4)
    with pytest.raises(ValueError):
        BandSpec(5, 2).validate(4, 4)


def test_empty_support_gives_zero(jt66):
    spec = NoiseSpec(0.5, np.zeros((6, 6), bool), seed=1)
    np.testing.assert_array_equal(gen_highfreq_noise(jt66, spec, 2).data, 0)


def test_noise_disjoint_from_band(jt66):
    band = BandSpec(4, 4)
    spec = NoiseSpec(0.3, highfreq_support(6, 6, band, 0), seed=2)
    coeffs = jt66.forward(gen_highfreq_noise(jt66, spec, 4).blocks())
    assert np.max(np.abs(coeffs[:, :4, :4])) < 1e-12


def test_noise_variance_monte_carlo(jt66):
    spec = NoiseSpec(1.0, np.ones((6, 6), bool), seed=3)
    noise = gen_highfreq_noise(jt66, spec, 200)
    w = jt66.inverse_factors()
    f_inv = np.kron(w[1], w[0])
    expected = np.trace(f_inv @ f_inv.conj().T).real / 36
    measured = np.mean(np.abs(noise.data) ** 2)
    assert abs(measured - expected) <= 0.1 * expected


def test_overlap_support_counts():
    band = BandSpec(4, 4)
    assert [highfreq_support(6, 6, band, o).sum() for o in (0, 2, 4)] == [20, 32, 36]
    assert not highfreq_support(6, 6, band, 2)[:2, :2].any()
    with pytest.raises(ValueError):
        highfreq_support(6, 6, band, 5)


def test_sidecar_round_trip():
    spec = SyntheticSpec(0.2, 2, 4, 4, 9)
    assert SyntheticSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ParseError):
        SyntheticSpec.from_json('{"sigma": 1, "overlap": 0, "k_band": 1, "l_band": 1, "seed": 0, "extra": 1}')
    assert spec.noise_spec(6, 6).seed == 10


def test_csv_blocks(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2,3,4\n5,6,7,8\n")
    x = load_timeseries_csv(p, t=2)
    assert (x.n, x.m) == (2, 2)
    np.testing.assert_array_equal(x.block(1), [[3, 4], [7, 8]])


def test_csv_errors(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2,3,4\n5,6,7\n")
    with pytest.raises(ParseError, match="row 2"):
        load_timeseries_csv(p, t=2)
    p.write_text("1,2\n3,abc\n")
    with pytest.raises(ParseError, match="row 2"):
        load_timeseries_csv(p, t=2)
    p.write_text("1,2,3\n")
    with pytest.raises(ParseError):
        load_timeseries_csv(p, t=2)
    p.write_text("1,2\n")
    with pytest.raises(ParseError):
        load_timeseries_csv(p, t=2, n_expected=3)


def test_csv_round_trip_bit_exact(tmp_path):
    rng = make_rng(8)
    data = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    data[0, 0] = 1e-300
    data[1, 1] = -3.5
    write_timeseries_csv(TimeVertexSignal(data, 3), tmp_path / "r.csv")
    back = load_timeseries_csv(tmp_path / "r.csv", t=3)
    np.testing.assert_array_equal(back.data, data)


def test_csv_zscore(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2,3,4\n5,5,5,5\n")
    x = load_timeseries_csv(p, t=2, zscore=True)
    np.testing.assert_allclose(x.data[0].mean(), 0, atol=1e-15)
    np.testing.assert_allclose(x.data[0].std(), 1)
    np.testing.assert_array_equal(x.data[1], 0)
