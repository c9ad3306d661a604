"""Finitely supported sequences on the integers.

A :class:`Sequence` stores a dense window ``values`` starting at index
``offset``; every entry outside the window is zero.  Instances are
immutable and always kept in canonical (trimmed) form, so two sequences
compare equal exactly when they agree at every integer.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Sequence:
    """A real sequence indexed by the integers with compact support.

    Integer-valued input keeps an ``int64`` dtype so that stencil
    arithmetic stays exact; anything else is stored as ``float64``.
    """

    __slots__ = ("_offset", "_values")

    def __init__(self, offset: int = 0, values: Iterable[float] = ()):
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        if arr.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if arr.size == 0:
            arr = np.zeros(0, dtype=np.int64)
        elif arr.dtype.kind in "iub":
            arr = arr.astype(np.int64)
        elif arr.dtype.kind == "f":
            arr = arr.astype(np.float64)
        else:
            raise TypeError(f"unsupported dtype {arr.dtype}")
        if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
            raise ValueError("sequence entries must be finite")
        nz = np.flatnonzero(arr)
        if nz.size == 0:
            self._offset = 0
            self._values = _freeze(np.zeros(0, dtype=arr.dtype))
        else:
            self._offset = int(offset) + int(nz[0])
            self._values = _freeze(arr[nz[0]:nz[-1] + 1].copy())

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "Sequence":
        return cls()

    @classmethod
    def impulse(cls, n: int = 0, value: float = 1) -> "Sequence":
        """``value`` times the unit impulse at ``n``."""
        return cls(n, [value])

    @classmethod
    def from_entries(cls, entries: Mapping[int, float] | Iterable[tuple[int, float]]) -> "Sequence":
        """Build from ``(index, value)`` pairs; repeated indices are summed."""
        items = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
        if not items:
            return cls()
        lo = min(int(n) for n, _ in items)
        hi = max(int(n) for n, _ in items)
        vals = [v for _, v in items]
        dtype = np.int64 if all(isinstance(v, (int, np.integer)) for v in vals) else np.float64
        arr = np.zeros(hi - lo + 1, dtype=dtype)
        for n, v in items:
            arr[int(n) - lo] += v
        return cls(lo, arr)

    # -- accessors --------------------------------------------------------

    @property
    def offset(self) -> int:
        return self._offset

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def is_zero(self) -> bool:
        return self._values.size == 0

    @property
    def support(self) -> tuple[int, int] | None:
        """Inclusive ``(lo, hi)`` of the stored window, ``None`` for zero."""
        if self.is_zero:
            return None
        return self._offset, self._offset + self._values.size - 1

    def __getitem__(self, n: int):
        i = int(n) - self._offset
        if 0 <= i < self._values.size:
            return self._values[i]
        return self._values.dtype.type(0)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Dense copy of the entries at ``lo..hi`` inclusive."""
        out = np.zeros(hi - lo + 1, dtype=self._values.dtype)
        if self.is_zero:
            return out
        s_lo, s_hi = self.support
        a, b = max(lo, s_lo), min(hi, s_hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self._values[a - s_lo:b - s_lo + 1]
        return out

    def items(self):
        """Yield ``(index, value)`` for the nonzero entries."""
        for i, v in enumerate(self._values):
            if v != 0:
                yield self._offset + i, v.item()

    # -- arithmetic -------------------------------------------------------

    def _combine(self, other: "Sequence", sign: int) -> "Sequence":
        if self.is_zero:
            return other if sign > 0 else -other
        if other.is_zero:
            return self
        lo = min(self.support[0], other.support[0])
        hi = max(self.support[1], other.support[1])
        return Sequence(lo, self.window(lo, hi) + sign * other.window(lo, hi))

    def __add__(self, other: "Sequence") -> "Sequence":
        return self._combine(other, 1)

    def __sub__(self, other: "Sequence") -> "Sequence":
        return self._combine(other, -1)

    def __neg__(self) -> "Sequence":
        return Sequence(self._offset, -self._values)

    def __mul__(self, scalar: float) -> "Sequence":
        return Sequence(self._offset, self._values * scalar)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Sequence":
        """The sequence ``n -> self[n - k]``."""
        return Sequence(self._offset + k, self._values)

    def map(self, func) -> "Sequence":
        """Apply ``func`` entrywise on the stored window (``func(0)`` must be 0)."""
        return Sequence(self._offset, func(self._values))

    # -- norms ------------------------------------------------------------

    def dot(self, other: "Sequence") -> float:
        if self.is_zero or other.is_zero:
            return 0.0
        lo = max(self.support[0], other.support[0])
        hi = min(self.support[1], other.support[1])
        if lo > hi:
            return 0.0
        return float(np.dot(self.window(lo, hi).astype(float), other.window(lo, hi).astype(float)))

    def norm(self, p: float = 2) -> float:
        if self.is_zero:
            return 0.0
        v = np.abs(self._values.astype(float))
        if p == np.inf:
            return float(v.max())
        top = v.max()
        # scale first so tiny or huge entries neither underflow nor overflow
        v = v / top
        if p == 2:
            return float(top * np.sqrt(np.dot(v, v)))
        return float(top * np.sum(v ** p) ** (1.0 / p))

    def power_sum(self, q: float) -> float:
        """``sum_n |x_n|**q`` over the support."""
        if self.is_zero:
            return 0.0
        return float(np.sum(np.abs(self._values.astype(float)) ** q))

    # -- dunder -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence):
            return NotImplemented
        return self._offset == other._offset and np.array_equal(self._values, other._values)

    def __hash__(self) -> int:
        return hash((self._offset, (self._values.astype(float) + 0.0).tobytes()))

    def __len__(self) -> int:
        return self._values.size

    def __repr__(self) -> str:
        return f"Sequence(offset={self._offset}, values={self._values.tolist()!r})"
