"""Exact integer matrix products with work accounting.

Count matrices hold non-negative path counts. Products run on int64 whenever
a bound on the result proves that no entry can overflow, and on Python
integers (numpy object dtype) otherwise. Every product is recorded in a
WorkCounter as the classical a*b*c multiply-add cost.
"""
import logging
import threading

import numpy as np

from hcycles import utils

logger = logging.getLogger(__name__)

DEFAULT_ENTRY_BITS = 128
INT64_LIMIT = 2 ** 63 - 1
OBJECT_BLOCK_ROWS = 256


class CountMatrix(object):
    """Dense matrix of non-negative integer counts."""

    def __init__(self, entries):
        entries = np.asarray(entries)
        if entries.ndim != 2:
            raise utils.InputError("Count matrices must be two dimensional.")
        if entries.dtype == bool or entries.dtype.kind in "iu":
            entries = entries.astype(np.int64)
        elif entries.dtype != object:
            raise utils.InputError(
                "Count matrices hold integers, got {}.".format(entries.dtype))
        if entries.size and entries.min() < 0:
            raise utils.InputError("Count matrix entries must be >= 0.")
        self.entries = entries

    @classmethod
    def identity(cls, size):
        """Get the size x size identity matrix."""
        return cls(np.eye(size, dtype=np.int64))

    @classmethod
    def from_adjacency(cls, adj):
        """Get the 0/1 count matrix of a boolean adjacency array."""
        return cls(np.asarray(adj, dtype=np.int64))

    @property
    def rows(self):
        """int: number of rows."""
        return int(self.entries.shape[0])

    @property
    def cols(self):
        """int: number of columns."""
        return int(self.entries.shape[1])

    @property
    def shape(self):
        """tuple: (rows, cols)."""
        return (self.rows, self.cols)

    def max_entry(self):
        """Get the largest entry as a Python int, 0 for empty matrices."""
        if not self.entries.size:
            return 0
        return int(self.entries.max())

    def transpose(self):
        """Get the transposed matrix."""
        return CountMatrix(self.entries.T)

    def diagonal(self):
        """Get the main diagonal as a list of Python ints."""
        return [int(value) for value in self.entries.diagonal()]

    def submatrix(self, rows, cols):
        """Get the block A[rows, cols].

        Args:
            rows (sequence of int): row indices, in output order.
            cols (sequence of int): column indices, in output order.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        return CountMatrix(self.entries[np.ix_(rows, cols)])

    def tolist(self):
        """Get the entries as nested lists of Python ints."""
        return [[int(value) for value in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, CountMatrix):
            return NotImplemented
        return self.shape == other.shape and self.tolist() == other.tolist()

    def __hash__(self):
        return hash((self.shape, tuple(map(tuple, self.tolist()))))

    def __repr__(self):
        return "CountMatrix({}x{})".format(self.rows, self.cols)


class WorkCounter(object):
    """Running total of classical matrix multiplication work.

    Attributes:
        scalar_mults (int): sum of a*b*c over all recorded products.
        mm_calls (list): (a, b, c) shape of every recorded product.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.scalar_mults = 0
        self.mm_calls = []

    def record(self, a, b, c):
        """Add one a x b by b x c product."""
        with self._lock:
            self.scalar_mults += a * b * c
            self.mm_calls.append((a, b, c))

    def merge(self, other):
        """Fold the totals of another counter into this one."""
        with self._lock:
            self.scalar_mults += other.scalar_mults
            self.mm_calls.extend(other.mm_calls)

    def summary(self):
        """Get a JSON friendly summary of the recorded work."""
        with self._lock:
            calls = list(self.mm_calls)
            total = self.scalar_mults
        largest = max(calls, key=lambda abc: abc[0] * abc[1] * abc[2],
                      default=None)
        return {
            "scalar_mults": total,
            "mm_calls": len(calls),
            "largest_shape": list(largest) if largest else None,
        }

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()


def _object_product(left, right):
    out = np.empty((left.shape[0], right.shape[1]), dtype=object)
    for start in range(0, left.shape[0], OBJECT_BLOCK_ROWS):
        stop = start + OBJECT_BLOCK_ROWS
        out[start:stop] = np.dot(left[start:stop], right)
    return out


def multiply(A, B, wc=None, entry_bits=DEFAULT_ENTRY_BITS):
    """Multiply two count matrices exactly.

    Args:
        A (CountMatrix): a x b left factor.
        B (CountMatrix): b x c right factor.
        wc (WorkCounter): optional counter, charged a*b*c.
        entry_bits (int): entries of the result must stay below
            2**entry_bits.

    Returns:
        CountMatrix: the a x c product.

    Raises:
        InputError: if the inner dimensions differ.
        CountOverflowError: if a result entry needs more than entry_bits bits.
    """
    if A.cols != B.rows:
        raise utils.InputError(
            "Cannot multiply {}x{} by {}x{}.".format(
                A.rows, A.cols, B.rows, B.cols))
    a, b, c = A.rows, A.cols, B.cols
    if wc is not None:
        wc.record(a, b, c)

    bound = A.max_entry() * B.max_entry() * b
    if bound <= INT64_LIMIT:
        product = np.dot(A.entries.astype(np.int64),
                         B.entries.astype(np.int64))
    else:
        logger.debug("Product %dx%dx%d bound %d needs big integers",
                     a, b, c, bound)
        product = _object_product(A.entries.astype(object),
                                  B.entries.astype(object))

    result = CountMatrix(product)
    if bound >= 2 ** entry_bits and result.max_entry() >= 2 ** entry_bits:
        raise utils.CountOverflowError(
            "Count matrix entry exceeds {} bits in a {}x{}x{} product.".format(
                entry_bits, a, b, c))
    if result.entries.dtype == object and result.max_entry() <= INT64_LIMIT:
        result = CountMatrix(result.entries.astype(np.int64))
    return result


def diagonal_product(A, B, wc=None, entry_bits=DEFAULT_ENTRY_BITS):
    """Get the diagonal of A B without forming the product.

    Entry i is sum_k A[i, k] * B[k, i]. The work counter is charged a*b, the
    cost of an a x b by b x 1 product.

    Args:
        A (CountMatrix): a x b left factor.
        B (CountMatrix): b x a right factor.
        wc (WorkCounter): optional counter.
        entry_bits (int): entries must stay below 2**entry_bits.

    Returns:
        numpy.ndarray: int64 values, or Python integers when int64 can not
            hold them.
    """
    if A.cols != B.rows or A.rows != B.cols:
        raise utils.InputError(
            "No square product for {}x{} by {}x{}.".format(
                A.rows, A.cols, B.rows, B.cols))
    a, b = A.rows, A.cols
    if wc is not None:
        wc.record(a, b, 1)

    bound = A.max_entry() * B.max_entry() * b
    if bound <= INT64_LIMIT:
        values = np.einsum("ij,ji->i", A.entries.astype(np.int64),
                           B.entries.astype(np.int64))
    else:
        values = (A.entries.astype(object) *
                  B.entries.T.astype(object)).sum(axis=1)

    largest = int(values.max()) if values.size else 0
    if bound >= 2 ** entry_bits and largest >= 2 ** entry_bits:
        raise utils.CountOverflowError(
            "Diagonal entry exceeds {} bits in a {}x{} product.".format(
                entry_bits, a, b))
    if values.dtype == object and largest <= INT64_LIMIT:
        values = values.astype(np.int64)
    return values


def rebalance_cost_check(p1, p2, p3, n):
    """Check MM(n p1, n p2, n p3) <= MM(n, n, n p1 p2 p3) for classical MM.

    Under the classical cost model both sides equal n**3 * p1 * p2 * p3, so
    the check holds up to floating point rounding for every valid input.

    Args:
        p1, p2, p3 (float): probabilities in (0, 1].
        n (int): matrix size.

    Returns:
        bool: whether the inequality holds.
    """
    for p in (p1, p2, p3):
        if not 0 < p <= 1:
            raise utils.InputError("Probabilities must lie in (0, 1].")
    if n < 0:
        raise utils.InputError("Matrix size must be non-negative.")
    left = (n * p1) * (n * p2) * (n * p3)
    right = n * n * (n * p1 * p2 * p3)
    return left <= right * (1 + 1e-9) + 1e-12
