"""
Various utility functions needed around the package
"""

import contextlib
import hashlib
import os
import pathlib
import tempfile

from .exceptions import MissingInputError
from .logging import logger


def get_callable_by_name(name):
    """
    Get a callable by its name.

    This function takes a string that represents the fully qualified name of a callable object
    (i.e., a function or a method), and returns the actual callable object. The name should be in
    the format 'module.submodule.callable'.

    Parameters
    ----------
    name : str
        The fully qualified name of the callable to be retrieved.

    Returns
    -------
    callable
        The callable object that corresponds to the given name.

    Raises
    ------
    ValueError
        If the name is not fully qualified.
    ImportError
        If the module or submodule specified in the name does not exist.
    AttributeError
        If the callable specified in the name does not exist in the given module or submodule.
    """
    if "." not in name:
        raise ValueError(
            f"Name '{name}' is not a fully qualified name. It should be in the format 'module.submodule.callable'."
        )
    module_name, callable_name = name.rsplit(".", 1)
    logger.debug(f"Importing module '{module_name}' to get callable '{callable_name}'")
    module = __import__(module_name, fromlist=[callable_name])
    return getattr(module, callable_name)


def require_file(path, what="input"):
    """Return ``path`` as a Path, raising :class:`MissingInputError` if it does not exist."""
    path = pathlib.Path(path)
    if not path.exists():
        raise MissingInputError(f"{what} file not found: {path}")
    return path


@contextlib.contextmanager
def atomic_write(path, mode="w", encoding="utf-8", newline=None):
    """
    Open a temporary file next to ``path`` and move it into place on success.

    Readers never observe a half-written output: the temporary file is renamed
    with :func:`os.replace` only after the block finished without an exception,
    and removed otherwise.

    Examples
    --------
    >>> with atomic_write(tmp_path / "csmf.csv") as f:  # doctest: +SKIP
    ...     f.write("cause,CSMF\\n")
    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    kwargs = {} if "b" in mode else {"encoding": encoding, "newline": newline}
    try:
        with os.fdopen(fd, mode, **kwargs) as f:
            yield f
        os.replace(tmp_name, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp_name)
        raise


def write_text_atomic(path, text):
    with atomic_write(path, newline="") as f:
        f.write(text)


def write_frame_atomic(df, path, **kwargs):
    """Write a DataFrame as CSV through :func:`atomic_write`, with stable float formatting."""
    kwargs.setdefault("index", False)
    kwargs.setdefault("float_format", "%.12g")
    kwargs.setdefault("lineterminator", "\n")
    with atomic_write(path, newline="") as f:
        df.to_csv(f, **kwargs)


def file_digest(path, algorithm="sha256", chunk_size=1 << 20):
    """Hex digest of the bytes of ``path``; directories are hashed file by file in sorted order."""
    path = pathlib.Path(path)
    digest = hashlib.new(algorithm)
    files = sorted(p for p in path.rglob("*") if p.is_file()) if path.is_dir() else [path]
    for file in files:
        if path.is_dir():
            digest.update(str(file.relative_to(path)).encode())
        with open(file, "rb") as f:
            for chunk in iter(lambda: f.read(chunk_size), b""):
                digest.update(chunk)
    return digest.hexdigest()
