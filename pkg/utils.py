# utils.py
import hashlib
import os
import sys
from typing import Any, Iterable, Optional, Sequence, Union


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path):
    """SHA-256 of a file, read in chunks. Empty string if unreadable."""
    try:
        h = hashlib.sha256()
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(8192), b""):
                h.update(chunk)
        return h.hexdigest()
    except OSError:
        return ""


def safe_read(path) -> Optional[str]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError:
        return None


def write_output(data: Union[str, bytes], out_path: Optional[str] = None):
    """
    Write rendered output to out_path, or to stdout when no path is given.
    Text is written with '\\n' line endings so reruns are byte-identical.
    """
    if out_path:
        folder = os.path.dirname(out_path)
        if folder and not os.path.exists(folder):
            os.makedirs(folder)
        if isinstance(data, bytes):
            with open(out_path, "wb") as f:
                f.write(data)
        else:
            with open(out_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(data)
        return
    if isinstance(data, bytes):
        sys.stdout.buffer.write(data)
    else:
        sys.stdout.write(data)
    sys.stdout.flush()


def markdown_table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Pipe table; cells are str()-ed and '|' is escaped."""
    def cell(v):
        return str(v).replace("|", "\\|")

    lines = ["| " + " | ".join(cell(h) for h in headers) + " |",
             "|" + "|".join("---" for _ in headers) + "|"]
    for r in rows:
        lines.append("| " + " | ".join(cell(v) for v in r) + " |")
    return "\n".join(lines) + "\n"
