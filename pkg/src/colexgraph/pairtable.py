"""Columnar storage for values over unordered language pairs."""

import numpy as np

from .errors import MalformedRow, ValueOutOfRange


def canonical_pair(a, b):
    """Return ``(a, b)`` ordered so that the first id sorts first."""
    return (a, b) if a < b else (b, a)


class PairValueTable:
    """Immutable mapping from unordered id pairs to float values.

    Pairs are stored as index arrays into the sorted ``ids`` tuple with
    ``ia < ib``, sorted by ``(ia, ib)``. This keeps all-pairs tables for a
    few thousand languages compact; a dict view is only built on demand.
    """

    __slots__ = ("ids", "ia", "ib", "values", "value_range", "_index")

    def __init__(self, ids, ia, ib, values, value_range=None, _checked=False):
        ids = tuple(ids)
        ia = np.asarray(ia, dtype=np.int64)
        ib = np.asarray(ib, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if not _checked:
            if list(ids) != sorted(set(ids)):
                raise ValueError("ids must be sorted and unique")
            if not (ia.shape == ib.shape == values.shape) or ia.ndim != 1:
                raise ValueError("index and value arrays must be 1-d and aligned")
            if np.any(ia == ib):
                raise MalformedRow("self-pair in pair table")
            swap = ia > ib
            ia, ib = np.where(swap, ib, ia), np.where(swap, ia, ib)
            order = np.lexsort((ib, ia))
            ia, ib, values = ia[order], ib[order], values[order]
            codes = ia * max(len(ids), 1) + ib
            dup = np.flatnonzero(np.diff(codes) == 0)
            if dup.size:
                k = dup[0]
                raise MalformedRow(
                    f"duplicate pair ({ids[ia[k]]}, {ids[ib[k]]}) in pair table"
                )
        if value_range is not None:
            lo, hi = value_range
            value_range = (float(lo), float(hi))
            bad = np.flatnonzero((values < lo) | (values > hi) | np.isnan(values))
            if bad.size:
                k = bad[0]
                raise ValueOutOfRange(
                    f"value {values[k]!r} for ({ids[ia[k]]}, {ids[ib[k]]}) "
                    f"outside [{lo}, {hi}]"
                )
        for arr in (ia, ib, values):
            arr.setflags(write=False)
        self.ids = ids
        self.ia = ia
        self.ib = ib
        self.values = values
        self.value_range = value_range
        self._index = None

    @classmethod
    def from_pairs(cls, items, value_range=None):
        """Build from ``{(a, b): v}`` or an iterable of ``(a, b, v)``.

        Repeated pairs must carry the same value.
        """
        if hasattr(items, "items"):
            items = ((a, b, v) for (a, b), v in items.items())
        merged = {}
        for a, b, v in items:
            if a == b:
                raise MalformedRow(f"self-pair ({a}, {a}) in pair table")
            key = canonical_pair(a, b)
            v = float(v)
            if key in merged and merged[key] != v:
                raise MalformedRow(
                    f"conflicting values {merged[key]!r} and {v!r} for pair {key}"
                )
            merged[key] = v
        ids = sorted({x for key in merged for x in key})
        pos = {x: i for i, x in enumerate(ids)}
        keys = list(merged)
        ia = [pos[a] for a, _ in keys]
        ib = [pos[b] for _, b in keys]
        return cls(ids, ia, ib, [merged[k] for k in keys], value_range)

    @classmethod
    def empty(cls, value_range=None):
        return cls((), [], [], [], value_range)

    def with_values(self, values, value_range=None):
        """Same pairs, new values."""
        return PairValueTable(
            self.ids, self.ia, self.ib, values, value_range, _checked=True
        )

    def __len__(self):
        return int(self.values.size)

    def _lookup(self):
        if self._index is None:
            self._index = {
                (self.ids[a], self.ids[b]): k
                for k, (a, b) in enumerate(zip(self.ia.tolist(), self.ib.tolist()))
            }
        return self._index

    def __getitem__(self, pair):
        k = self._lookup()[canonical_pair(*pair)]
        return float(self.values[k])

    def __contains__(self, pair):
        return canonical_pair(*pair) in self._lookup()

    def get(self, pair, default=None):
        k = self._lookup().get(canonical_pair(*pair))
        return default if k is None else float(self.values[k])

    def pairs(self):
        ids = self.ids
        return [(ids[a], ids[b]) for a, b in zip(self.ia.tolist(), self.ib.tolist())]

    def items(self):
        return list(zip(self.pairs(), self.values.tolist()))

    def to_dict(self):
        return dict(self.items())

    def __iter__(self):
        return iter(self.pairs())

    def __eq__(self, other):
        if not isinstance(other, PairValueTable):
            return NotImplemented
        return (
            self.to_dict() == other.to_dict()
            and self.value_range == other.value_range
        )

    def __repr__(self):
        return f"PairValueTable({len(self)} pairs over {len(self.ids)} ids)"
