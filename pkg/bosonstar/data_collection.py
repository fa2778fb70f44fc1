from collections import ChainMap
import json
import os

from bosonstar.json_handling import to_json


class Trace(ChainMap):
    """Records per-iteration (or per-time-step) quantities.

    Values set between two checkpoints form a sparse row; `checkpoint()`
    cumulates it on top of the previous rows and freezes a copy in
    `history`. With a filename, every sparse row is also appended to a
    JSON-lines file, which `Trace.load_file` reads back.

    >>> trace = Trace()
    >>> for i in range(3):
    ...     trace["residual"] = 10.0**-i
    ...     trace.checkpoint()
    >>> trace[:, "residual"]
    [1.0, 0.1, 0.01]
    """

    def __init__(self, filename=None, append=False):
        self._sparse = {}
        self._cumulated = {}
        super().__init__(self._sparse, self._cumulated)

        self.filename = filename
        self.file = None
        self.history = _Rows()
        if filename is None:
            return
        if os.path.exists(filename):
            assert append, ("{} already exists, append option is necessary to continue"
                            .format(filename))
            self.history = Trace.load_file(filename).history
            if self.history:
                self._cumulated.update(self.history[-1])
            self.file = open(filename, "a")
        else:
            self.file = open(filename, "w")

    @staticmethod
    def _read_json(file):
        while True:
            s = file.readline()
            if not s:
                break
            if s.strip():
                yield json.loads(s)

    @staticmethod
    def load_file(filename):
        trace = Trace()
        with open(filename, "r") as file:
            cum = {}
            for obj in Trace._read_json(file):
                cum = {**cum, **obj}
                trace.history.append(_Row(cum))
        if trace.history:
            trace._cumulated.update(trace.history[-1])
        return trace

    def __getitem__(self, key):
        if isinstance(key, tuple):
            return self.history.__getitem__(key)
        if isinstance(key, list):
            sup = super()
            return [sup.__getitem__(k) for k in key]
        return super().__getitem__(key)

    def __setitem__(self, key, value):
        if isinstance(key, list):
            assert len(key) == len(value)
            for k, v in zip(key, value):
                assert isinstance(k, str)
                super().__setitem__(k, v)
        else:
            assert isinstance(key, str)
            super().__setitem__(key, value)

    @property
    def iteration(self):
        return len(self.history)

    def checkpoint(self):
        sparse = self._sparse
        cumulated = self._cumulated
        if self.file is not None:
            self.file.write(json.dumps(to_json(sparse), separators=(',', ':')))
            self.file.write("\n")
            self.file.flush()
        cumulated.update(sparse)
        self.history.append(_Row(cumulated.copy()))
        sparse.clear()

    def column(self, key):
        return self.history[:, key]

    def to_rows(self, keys):
        """List of rows restricted to keys, missing entries as None"""
        return [[row.get(k) for k in keys] for row in self.history]

    def close(self):
        if self.file is not None:
            self.file.close()
            self.file = None


class _Row(dict):
    """A trace row; row[key:default] reads with a default, row[[k1, k2]] several keys"""
    def __getitem__(self, key):
        if isinstance(key, slice):
            return super().get(key.start, key.stop)
        if isinstance(key, list):
            sup = super()
            return [sup.__getitem__(k) for k in key]
        return super().__getitem__(key)


class _Rows(list):
    """Add slice selection for a list of rows"""
    def __getitem__(self, key):
        if isinstance(key, tuple):
            assert len(key) == 2, ("Key tuple must be of length 2,"
                                   "got {!r}".format(key))
            key0, key1 = key
            if isinstance(key0, slice):
                sup = super()
                return [row[key1] for row in sup.__getitem__(key0)]
            return super().__getitem__(key0)[key1]
        return super().__getitem__(key)
