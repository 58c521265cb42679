"""Binary PPM (P6) and PGM (P5) readers and writers.

RGB images travel as P6, gray images as P5, and binary masks as P5 with
values 0 and 255.  Maxval is always 255.  Readers accept ``#`` comments
and arbitrary whitespace inside the header.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise ValidationError("truncated netpbm header")
        c = data[i:i + 1]
        if c == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j:j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    # exactly one whitespace byte separates the header from pixel data
    return tokens, i + 1


def write_ppm(img: np.ndarray) -> bytes:
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValidationError("PPM writer expects a HxWx3 uint8 array")
    h, w = img.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + img.tobytes()


def write_pgm(gray: np.ndarray) -> bytes:
    if gray.dtype == bool:
        gray = gray.astype(np.uint8) * 255
    if gray.ndim != 2 or gray.dtype != np.uint8:
        raise ValidationError("PGM writer expects a HxW uint8 or bool array")
    h, w = gray.shape
    return b"P5\n%d %d\n255\n" % (w, h) + gray.tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    tokens, offset = _header_tokens(data, 4)
    if tokens[0] != b"P6":
        raise ValidationError(f"expected P6 magic, got {tokens[0]!r}")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValidationError(f"only maxval 255 is supported, got {maxval}")
    need = w * h * 3
    body = data[offset:offset + need]
    if len(body) != need:
        raise ValidationError("truncated PPM pixel data")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3).copy()


def read_pgm(data: bytes) -> np.ndarray:
    tokens, offset = _header_tokens(data, 4)
    if tokens[0] != b"P5":
        raise ValidationError(f"expected P5 magic, got {tokens[0]!r}")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValidationError(f"only maxval 255 is supported, got {maxval}")
    need = w * h
    body = data[offset:offset + need]
    if len(body) != need:
        raise ValidationError("truncated PGM pixel data")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w).copy()


def read_mask(data: bytes) -> np.ndarray:
    """Read a PGM as a boolean mask; anything above 127 counts as foreground."""
    return read_pgm(data) > 127
