from itertools import takewhile
from datetime import datetime
import os
import re

import numpy as np


def timestamp():
    datetime_ = datetime.now()
    return "{}_{}".format(datetime_.strftime("%Y%m%d"), datetime_.strftime("%H%M%S"))


def format_filename(pattern, **fields):
    """Fill a filename pattern. Named fields come from the caller, `{}` and
    `{datetime}` are replaced by the current date and time.

    >>> format_filename("groundstate_{n}_{rmax:g}.csv", n=2048, rmax=200.0)
    'groundstate_2048_200.csv'
    """
    datetime_ = timestamp()
    date, time = datetime_.split("_")
    return pattern.format(datetime_, datetime=datetime_, date=date, time=time,
                          **fields)


class PatternFactory:
    """Transforms strings composed of * and ** to matches on strings with
    particular separator"""
    def __init__(self, separator):
        separator = re.escape(separator)
        self.substitutions = {"*":  r"[^{}]*".format(separator),
                              "**": r".*"}

    def _substitute(self, match):
        match = match.group()
        return self.substitutions.get(match, match)

    def create_regex(self, pattern):
        pattern = pattern.replace(".", r"\.")
        pattern = re.sub(r"\*+", self._substitute, pattern)
        return re.compile("^{}$".format(pattern))

_factory = PatternFactory("/")


def find_files(pattern, base_dir=""):
    """Given a filename pattern relative to base_dir, returns the sorted
    matching files (relative paths)"""
    sections = re.split(r"/+", pattern)
    root = tuple(takewhile(lambda section: "*" not in section, sections[:-1]))
    pattern = sections[len(root):]
    recursive = len(pattern) > 1 or any("**" in p for p in pattern)

    regex = _factory.create_regex("/".join(pattern))
    root = os.sep.join(root)
    _root = os.path.join(base_dir, root) if base_dir else (root or ".")
    if not os.path.isdir(_root):
        return []

    lst = []
    for dirpath, _dirnames, filenames in os.walk(_root, topdown=True):
        relpath = os.path.relpath(dirpath, _root)
        for filename in filenames:
            path = filename if relpath == "." else os.path.join(relpath, filename)
            if regex.match(path.replace(os.sep, "/")) is not None:
                lst.append(os.path.join(root, path))
        if not recursive:
            break
    lst.sort()
    return lst


def write_columns(filename, header, columns):
    """CSV with a header line and full double precision"""
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(filename, data, delimiter=",", header=",".join(header),
               comments="", fmt="%.17g")


def read_columns(filename):
    """Returns (header, columns) of a file written by write_columns"""
    with open(filename, "r") as file:
        header = file.readline().strip().split(",")
    data = np.loadtxt(filename, delimiter=",", skiprows=1, ndmin=2)
    return header, [data[:, j] for j in range(data.shape[1])]
