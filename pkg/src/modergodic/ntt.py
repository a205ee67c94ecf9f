"""Exact cyclic convolution of nonnegative integer vectors via a number theoretic transform.

Works over the prime 998244353 = 119 * 2^23 + 1 with primitive root 3, so
transform lengths up to 2^23 are available. All arithmetic is in uint64; the
products of two residues stay below 2^60.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MOD = 998244353
ROOT = 3
MAX_LOG = 23

__all__ = ["MOD", "cyclic_convolve", "cyclic_correlate", "direct_cyclic_correlate"]


@lru_cache(maxsize=32)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=64)
def _twiddles(length: int, invert: bool) -> np.ndarray:
    half = length // 2
    w = pow(ROOT, (MOD - 1) // length, MOD)
    if invert:
        w = pow(w, MOD - 2, MOD)
    tw = np.ones(1, dtype=np.uint64)
    # doubling: tw[k + m] = tw[k] * w^m
    while tw.size < half:
        step = np.uint64(pow(w, tw.size, MOD))
        tw = np.concatenate([tw, tw * step % np.uint64(MOD)])
    return tw[:half]


def _ntt(a: np.ndarray, invert: bool = False) -> np.ndarray:
    n = a.size
    a = a[_bitrev(n)].copy()
    mod = np.uint64(MOD)
    length = 2
    while length <= n:
        half = length // 2
        blocks = a.reshape(n // length, length)
        u = blocks[:, :half].copy()
        v = blocks[:, half:] * _twiddles(length, invert)
        v %= mod
        np.add(u, v, out=blocks[:, :half])
        np.subtract(u + mod, v, out=blocks[:, half:])
        blocks %= mod
        length *= 2
    if invert:
        a = a * np.uint64(pow(n, MOD - 2, MOD)) % mod
    return a


def _check_bound(a: np.ndarray, b: np.ndarray) -> None:
    amax = int(a.max()) if a.size else 0
    bmax = int(b.max()) if b.size else 0
    if min(a.size, b.size) * amax * bmax >= MOD:
        raise OverflowError("convolution entries could reach the transform modulus")
    if int(a.min(initial=0)) < 0 or int(b.min(initial=0)) < 0:
        raise ValueError("transform kernel takes nonnegative integer vectors")


def cyclic_convolve(a, b) -> np.ndarray:
    """Return c with c[k] = sum_x a[x] * b[(k - x) mod N], exactly."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("cyclic_convolve expects two vectors of equal length")
    _check_bound(a, b)
    N = a.size
    size = 1
    while size < 2 * N - 1:
        size *= 2
    if size.bit_length() - 1 > MAX_LOG:
        raise OverflowError(f"length {N} exceeds the transform capacity")
    fa = np.zeros(size, dtype=np.uint64)
    fb = np.zeros(size, dtype=np.uint64)
    fa[:N] = a
    fb[:N] = b
    prod = _ntt(fa) * _ntt(fb) % np.uint64(MOD)
    lin = _ntt(prod, invert=True).astype(np.int64)
    out = lin[:N].copy()
    out[: N - 1] += lin[N : 2 * N - 1]
    return out


def cyclic_correlate(a, b) -> np.ndarray:
    """Return c with c[h] = sum_x a[x] * b[(x - h) mod N], exactly."""
    b = np.asarray(b, dtype=np.int64)
    rev = np.roll(b[::-1], 1)  # rev[y] = b[-y mod N]
    return cyclic_convolve(a, rev)


def direct_cyclic_correlate(a, b) -> np.ndarray:
    """O(N^2) correlation on arbitrary integer vectors (object dtype when large)."""
    a = np.asarray(a)
    b = np.asarray(b)
    N = a.size
    big = a.dtype == object or b.dtype == object
    if not big:
        bound = int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0)) * N
        big = bound >= 1 << 62
    if big:
        a = a.astype(object)
        b = b.astype(object)
        return np.array(
            [sum(int(a[x]) * int(b[(x - h) % N]) for x in range(N)) for h in range(N)],
            dtype=object,
        )
    a = a.astype(np.int64)
    b = b.astype(np.int64)
    return np.array([int(np.dot(a, np.roll(b, h))) for h in range(N)], dtype=np.int64)
