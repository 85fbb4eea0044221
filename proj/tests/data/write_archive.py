#!/usr/bin/env python3
"""Writes external.entprun with only the Python standard library.

Used as an independent writer for the archive loader tests: the header is
pretty-printed with keys in non-sorted order and the payload is not padded
to an aligned file offset, unlike the C++ writer.
"""
import json
import struct
import sys

TENSORS = {
    "blocks.0.attn.wq.weight": ([2, 3], [0.1, -2.5, 3.0, 1e-3, 65504.0, -0.0]),
    "head.bias": ([3], [1.0, 2.0, 3.0]),
}


def main(path):
    header = {}
    payload = bytearray()
    for name, (shape, values) in TENSORS.items():
        while len(payload) % 64:
            payload.append(0)
        data = struct.pack("<%df" % len(values), *values)
        header[name] = {"dtype": "f32", "shape": shape, "offset": len(payload), "nbytes": len(data)}
        payload += data
    text = json.dumps(header, indent=2).encode("utf-8")
    with open(path, "wb") as f:
        f.write(b"ENTPRUN1")
        f.write(struct.pack("<Q", len(text)))
        f.write(text)
        f.write(payload)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "external.entprun")
