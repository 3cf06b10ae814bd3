"""Utility functions shared by the hcycles modules.

Holds the exception hierarchy, seeding helpers and the base 2 logarithm that
every polylog constant is expressed in.
"""
import logging
import math
import numbers

import numpy as np

logger = logging.getLogger(__name__)


class HCyclesError(Exception):
    """Base class for all errors raised by hcycles."""


class InputError(HCyclesError, ValueError):
    """Invalid arguments, out of range vertex ids or malformed files."""


class BudgetExceededError(HCyclesError):
    """Brute force enumeration ran past its budget."""


class CountOverflowError(HCyclesError, OverflowError):
    """A count matrix entry does not fit in the configured bit width."""


class InvariantError(HCyclesError):
    """An internal invariant was breached.

    This is never the caller's fault; it means that an exact identity the
    algorithms rely on did not hold.
    """


def log2n(n):
    """Return log2(n), floored at 1 so that polylog factors stay positive.

    Args:
        n (int): graph size.

    Returns:
        float: max(1, log2(n)).
    """
    if n < 2:
        return 1.0
    return max(1.0, math.log2(n))


def median_of(values):
    """Get the median of a non-empty sequence, the lower one for even sizes.

    If more than half of the values lie in an interval [a, b], the median
    lies in it too.

    Raises:
        InputError: for an empty sequence.
    """
    values = sorted(values)
    if not values:
        raise InputError("Cannot take the median of nothing.")
    return values[(len(values) - 1) // 2]


def as_seed_sequence(rng_seed):
    """Turn an int or SeedSequence into a numpy SeedSequence.

    Seeds are mandatory. There is no wall clock default anywhere in the
    package, so ``None`` is rejected.

    Args:
        rng_seed (int or numpy.random.SeedSequence): seed value.

    Returns:
        numpy.random.SeedSequence
    """
    if isinstance(rng_seed, np.random.SeedSequence):
        return rng_seed
    if isinstance(rng_seed, numbers.Integral) and not isinstance(
            rng_seed, bool) and rng_seed >= 0:
        return np.random.SeedSequence(int(rng_seed))
    raise InputError("rng_seed must be a non-negative integer or a "
                     "SeedSequence, got {!r}".format(rng_seed))


def make_rng(rng_seed):
    """Get a numpy random generator for the given seed."""
    return np.random.default_rng(as_seed_sequence(rng_seed))


def spawn_seeds(rng_seed, count):
    """Split a seed into ``count`` independent child seeds.

    Children are derived with SeedSequence.spawn, so the result only depends
    on the parent seed and on the order of spawn calls.
    """
    return as_seed_sequence(rng_seed).spawn(count)


def seed_repr(rng_seed):
    """Get a JSON friendly description of a seed."""
    seq = as_seed_sequence(rng_seed)
    return {
        "entropy": seq.entropy,
        "spawn_key": list(seq.spawn_key),
    }
