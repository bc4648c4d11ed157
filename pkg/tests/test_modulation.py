import numpy as np
import pytest

from ic_stbc.modulation import (
    count_bit_errors,
    demap_hard,
    demap_labels,
    difference_set,
    make_qam,
    map_bits,
)


@pytest.mark.parametrize("order", [4, 16, 64])
def test_unit_average_energy_and_distinct_points(order):
    c = make_qam(order)
    assert c.points.size == order
    assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) < 1e-12
    assert np.unique(np.round(c.points, 9)).size == order


def test_qpsk_points():
    c = make_qam(4)
    assert np.allclose(sorted(c.points * np.sqrt(2), key=lambda z: (z.real, z.imag)),
                       [-1 - 1j, -1 + 1j, 1 - 1j, 1 + 1j])


@pytest.mark.parametrize("order", [4, 16, 64])
def test_gray_neighbours_differ_by_one_bit(order):
    c = make_qam(order)
    dmin = np.min(np.abs(c.points[:, None] - c.points[None, :])[~np.eye(order, dtype=bool)])
    for i in range(order):
        for j in range(order):
            if i != j and abs(abs(c.points[i] - c.points[j]) - dmin) < 1e-9:
                assert count_bit_errors(c, [i], [j]) == 1


@pytest.mark.parametrize("order", [4, 16, 64])
def test_bits_round_trip(order, rng):
    c = make_qam(order)
    bits = rng.integers(0, 2, size=c.bits_per_symbol * 50)
    sym = map_bits(c, bits)
    assert np.array_equal(demap_hard(c, sym), bits)


def test_map_bits_rejects_bad_length():
    with pytest.raises(ValueError):
        map_bits(make_qam(16), [0, 1, 1])


def test_demap_ties_go_to_lowest_index():
    c = make_qam(4)
    assert demap_labels(c, [0j])[0] == 0


@pytest.mark.parametrize("order,count", [(4, 9), (16, 49), (64, 225)])
def test_difference_set_size(order, count):
    # per axis the level differences form 2*side-1 values, so the count is (2*side-1)**2
    c = make_qam(order)
    d = difference_set(c)
    brute = {(round(v.real, 9), round(v.imag, 9)) for v in (c.points[:, None] - c.points[None, :]).ravel()}
    assert d.size == len(brute) == count
    assert np.any(d == 0)


def test_sixteen_qam_ordered_nonzero_pairs():
    c = make_qam(16)
    diff = (c.points[:, None] - c.points[None, :]).ravel()
    assert np.count_nonzero(np.abs(diff) > 1e-12) == 240


def test_unsupported_order():
    with pytest.raises(ValueError):
        make_qam(8)
