"""Binary netpbm image I/O: P6 color in, P5 grayscale out.

Parsing follows the netpbm header rules: the magic, then width,
height, maxval as ASCII decimals separated by whitespace, with
'#'-to-end-of-line comments allowed between tokens, then exactly one
whitespace byte before the raster. Errors carry the byte offset where
parsing gave up.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError


class _Cursor:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def skip_space_and_comments(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos]
            if c in b" \t\r\n":
                self.pos += 1
            elif c == ord("#"):
                nl = data.find(b"\n", self.pos)
                if nl < 0:
                    raise ParseError(
                        f"unterminated comment at byte {self.pos}", offset=self.pos
                    )
                self.pos = nl + 1
            else:
                return

    def token(self, what):
        self.skip_space_and_comments()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos] not in b" \t\r\n#":
            self.pos += 1
        if self.pos == start:
            raise ParseError(
                f"expected {what} at byte {start}", offset=start
            )
        return data[start : self.pos]

    def int_token(self, what):
        tok = self.token(what)
        try:
            return int(tok)
        except ValueError:
            raise ParseError(
                f"bad {what} {tok!r} at byte {self.pos - len(tok)}",
                offset=self.pos - len(tok),
            )


def _read_raster(path, magic, channels):
    with open(path, "rb") as fh:
        data = fh.read()
    cur = _Cursor(data)
    got = cur.token("magic number")
    if got != magic:
        raise ParseError(
            f"expected {magic.decode()} file, found {got!r} at byte 0", offset=0
        )
    width = cur.int_token("width")
    height = cur.int_token("height")
    maxval = cur.int_token("maxval")
    if width < 1 or height < 1:
        raise ParseError(f"bad dimensions {width}x{height}", offset=cur.pos)
    if maxval != 255:
        raise ParseError(f"only maxval 255 is supported, got {maxval}", offset=cur.pos)
    if cur.pos >= len(data) or data[cur.pos] not in b" \t\r\n":
        raise ParseError(
            f"expected whitespace before raster at byte {cur.pos}", offset=cur.pos
        )
    cur.pos += 1
    need = width * height * channels
    raster = data[cur.pos : cur.pos + need]
    if len(raster) != need:
        raise ParseError(
            f"raster truncated at byte {cur.pos + len(raster)}: "
            f"need {need} bytes, have {len(raster)}",
            offset=cur.pos + len(raster),
        )
    arr = np.frombuffer(raster, dtype=np.uint8)
    if channels == 1:
        return arr.reshape(height, width).copy()
    return arr.reshape(height, width, channels).copy()


def read_ppm(path):
    """P6 file -> uint8 array (height, width, 3)."""
    return _read_raster(path, b"P6", 3)


def read_pgm(path):
    """P5 file -> uint8 array (height, width)."""
    return _read_raster(path, b"P5", 1)


def _header(magic, arr):
    h, w = arr.shape[:2]
    return f"{magic}\n{w} {h}\n255\n".encode("ascii")


def write_ppm(path, image):
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ParseError("ppm writer expects (h, w, 3) uint8")
    with open(path, "wb") as fh:
        fh.write(_header("P6", image))
        fh.write(image.tobytes())


def write_pgm(path, image):
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim != 2:
        raise ParseError("pgm writer expects (h, w) uint8")
    with open(path, "wb") as fh:
        fh.write(_header("P5", image))
        fh.write(image.tobytes())
