"""Small file-writing helpers used by every module that persists output."""

import os
import tempfile
from contextlib import contextmanager


@contextmanager
def atomic_write(path):
    """Open a temp file next to `path` and rename it over `path` on success.

    Readers never observe a half-written file. Text mode, UTF-8, LF endings.
    """
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def fmt(x) -> str:
    """Shortest decimal representation that round-trips the float exactly."""
    return repr(float(x))
