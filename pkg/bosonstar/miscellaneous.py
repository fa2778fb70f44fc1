from multiprocessing.pool import ThreadPool
from contextlib import contextmanager

import numpy as np


class Record(dict):
    """A dict whose keys are also attributes, used for every report the
    package produces"""
    def __new__(cls, *args, **kwargs):
        record = super().__new__(cls, *args, **kwargs)
        record.__dict__ = record
        return record

    def __repr__(self):
        return "{}({})".format(self.__class__.__qualname__,
                               super().__repr__())

    @classmethod
    def from_dict(cls, dic):
        """__init__ of subclasses may validate or derive fields. In order to
        directly feed a dictionary, from_dict can be used
        """
        record = cls.__new__(cls)
        record.update(dic)
        return record

    def __copy__(self):
        return self.__class__.from_dict(self)
    copy = __copy__

    def summary(self):
        """JSON-ready view: nested records are summarized, fields and other
        arrays are left out (they go to CSV files)"""
        out = {}
        for k, v in self.items():
            if isinstance(v, Record):
                out[k] = v.summary()
            elif hasattr(v, "grid"):
                continue
            else:
                out[k] = v
        return out


@contextmanager
def seeded(seed, random=np.random):
    """Temporarily seed a random module, restoring its state afterwards.

    >>> with seeded(3) as random:
    ...     a = random.rand()
    >>> with seeded(3) as random:
    ...     b = random.rand()
    >>> a == b
    True
    """
    if hasattr(random, "get_state"):
        old_state = random.get_state()
        random.seed(seed)
        try:
            yield random
        finally:
            random.set_state(old_state)
    elif hasattr(random, "getstate"):
        old_state = random.getstate()
        random.seed(seed)
        try:
            yield random
        finally:
            random.setstate(old_state)
    else:
        raise TypeError("Random object not recognized")


def parallel_map(f, items, processes=None):
    """Map f over items on a thread pool, preserving order.

    numpy/scipy linear algebra releases the GIL, so threads are enough for
    independent dense eigensolves.
    """
    items = list(items)
    if processes == 1 or len(items) <= 1:
        return [f(item) for item in items]
    pool = ThreadPool(processes or len(items))
    try:
        return pool.map(f, items)
    finally:
        pool.close()
        pool.join()
