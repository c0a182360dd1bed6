"""Text formats: set files, function files, and key=value configuration."""
from __future__ import annotations

from pathlib import Path

from .energy import LatticeFunction
from .lattice import LatticeSet

__all__ = [
    "FormatError",
    "read_set_file",
    "write_set_file",
    "read_function_file",
    "write_function_file",
    "read_config",
]


class FormatError(ValueError):
    """Raised when an input file violates its documented format."""


def _read_lines(path) -> list[str]:
    text = Path(path).read_text()
    return [ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")]


def read_set_file(path) -> LatticeSet:
    """Read a point set: header "d N", then N lines of d integers."""
    lines = _read_lines(path)
    if not lines:
        raise FormatError("empty set file")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("set file header must be 'd N'")
    try:
        d, n = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError("set file header must hold two integers") from exc
    if d < 1 or n < 0:
        raise FormatError("invalid dimensions in set file header")
    body = lines[1:]
    if len(body) != n:
        raise FormatError(f"set file declares {n} points but has {len(body)}")
    pts = []
    for ln in body:
        parts = ln.split()
        if len(parts) != d:
            raise FormatError(f"point line needs {d} coordinates: {ln!r}")
        try:
            pts.append(tuple(int(x) for x in parts))
        except ValueError as exc:
            raise FormatError(f"non-integer coordinate in {ln!r}") from exc
    if len(set(pts)) != len(pts):
        raise FormatError("duplicate points in set file")
    return LatticeSet(pts, dim=d)


def write_set_file(X: LatticeSet, path) -> None:
    lines = [f"{X.dim} {len(X)}"]
    for pnt in X:
        lines.append(" ".join(str(c) for c in pnt))
    Path(path).write_text("\n".join(lines) + "\n")


def read_function_file(path) -> LatticeFunction:
    """Read a function: header "d M", then M lines of d integers and a value."""
    lines = _read_lines(path)
    if not lines:
        raise FormatError("empty function file")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("function file header must be 'd M'")
    try:
        d, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError("function file header must hold two integers") from exc
    body = lines[1:]
    if len(body) != m:
        raise FormatError(f"function file declares {m} entries but has {len(body)}")
    mapping = {}
    for ln in body:
        parts = ln.split()
        if len(parts) != d + 1:
            raise FormatError(f"entry needs {d} coordinates and a value: {ln!r}")
        try:
            pnt = tuple(int(x) for x in parts[:d])
            val = float(parts[d])
        except ValueError as exc:
            raise FormatError(f"malformed entry {ln!r}") from exc
        if pnt in mapping:
            raise FormatError(f"duplicate point {pnt} in function file")
        mapping[pnt] = val
    return LatticeFunction.from_dict(mapping, dim=d)


def write_function_file(u: LatticeFunction, path) -> None:
    items = list(u.items())
    lines = [f"{u.dim} {len(items)}"]
    for pnt, val in items:
        lines.append(" ".join(str(c) for c in pnt) + f" {val!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_scalar(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def read_config(path) -> dict:
    """Parse key=value lines; '#' starts a comment; values typed leniently."""
    out = {}
    for ln in _read_lines(path):
        if "=" not in ln:
            raise FormatError(f"config line needs key=value: {ln!r}")
        key, _, val = ln.partition("=")
        key = key.strip()
        if not key:
            raise FormatError(f"empty key in config line {ln!r}")
        out[key] = _parse_scalar(val.strip())
    return out
