"""Square QAM constellations with Gray labeling, unit average energy."""

from dataclasses import dataclass, field

import numpy as np

SUPPORTED_ORDERS = (4, 16, 64)


def _gray(n: np.ndarray) -> np.ndarray:
    return n ^ (n >> 1)


@dataclass(frozen=True)
class Constellation:
    """A finite alphabet whose point index *is* its bit label.

    ``points[k]`` carries the label ``k`` written MSB first on
    ``bits_per_symbol`` bits; the upper half of the label is the Gray code of
    the in-phase level index, the lower half that of the quadrature level.
    """

    order: int
    points: np.ndarray = field(repr=False)
    grid: np.ndarray = field(repr=False)  # (order, 2) in-phase/quadrature level indices

    @property
    def bits_per_symbol(self) -> int:
        return int(self.order).bit_length() - 1

    def label_bits(self, labels) -> np.ndarray:
        """Bits (MSB first) of each label, shape ``labels.shape + (bits_per_symbol,)``."""
        labels = np.asarray(labels, dtype=np.int64)
        shifts = np.arange(self.bits_per_symbol - 1, -1, -1)
        return ((labels[..., None] >> shifts) & 1).astype(np.uint8)

    def labels_from_bits(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64).reshape(-1, self.bits_per_symbol)
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        return bits @ weights


def make_qam(order: int) -> Constellation:
    """Gray-labeled square QAM of the given order with unit average energy.

    >>> c = make_qam(4)
    >>> c.points * np.sqrt(2)
    array([-1.-1.j, -1.+1.j,  1.-1.j,  1.+1.j])
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {order}; choose one of {SUPPORTED_ORDERS}")
    side = int(round(np.sqrt(order)))
    half = side.bit_length() - 1
    levels = 2 * np.arange(side) - (side - 1)
    inverse_gray = np.empty(side, dtype=np.int64)
    inverse_gray[_gray(np.arange(side))] = np.arange(side)

    labels = np.arange(order)
    i_idx = inverse_gray[labels >> half]
    q_idx = inverse_gray[labels & (side - 1)]
    raw = levels[i_idx] + 1j * levels[q_idx]
    scale = np.sqrt(np.mean(np.abs(raw) ** 2))
    points = raw / scale
    points.setflags(write=False)
    grid = np.stack([i_idx, q_idx], axis=1)
    grid.setflags(write=False)
    return Constellation(order=order, points=points, grid=grid)


def difference_set(c: Constellation) -> np.ndarray:
    """Distinct values of ``a - b`` over all point pairs, including 0.

    Values are rounded onto the (scaled) integer lattice they live on, so the
    result is exact and sorted deterministically (real part, then imaginary).
    """
    step = np.diff(np.unique(np.round(c.points.real, 12))).min()
    d = (c.points[:, None] - c.points[None, :]).ravel()
    lattice = np.unique(np.stack([np.rint(d.real / step), np.rint(d.imag / step)], axis=1), axis=0)
    return (lattice[:, 0] + 1j * lattice[:, 1]) * step


def map_bits(c: Constellation, bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % c.bits_per_symbol:
        raise ValueError(
            f"bit string length {bits.size} is not a multiple of {c.bits_per_symbol}"
        )
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must be 0 or 1")
    return c.points[c.labels_from_bits(bits)]


def demap_labels(c: Constellation, symbols) -> np.ndarray:
    """Nearest-point label per symbol; equidistant ties go to the lowest label."""
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    dist = np.abs(symbols[:, None] - c.points[None, :])
    return np.argmin(dist, axis=1)


def demap_hard(c: Constellation, symbols) -> np.ndarray:
    return c.label_bits(demap_labels(c, symbols)).ravel()


def count_bit_errors(c: Constellation, sent_labels, decided_labels) -> int:
    x = np.bitwise_xor(np.asarray(sent_labels, np.int64), np.asarray(decided_labels, np.int64))
    return int(c.label_bits(x).sum())
