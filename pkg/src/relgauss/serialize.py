"""JSON encoding of matrices and complex scalars.

Matrices are stored row-major; every entry is an [re, im] pair so the
schema does not depend on whether a matrix happens to be real.
"""

from __future__ import annotations

import numpy as np


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair) -> complex:
    return complex(pair[0], pair[1])


def encode_matrix(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    rows, cols = m.shape
    data = [encode_complex(m[i, j]) for i in range(rows) for j in range(cols)]
    return {"rows": rows, "cols": cols, "data": data}


def decode_matrix(doc) -> np.ndarray:
    rows, cols = int(doc["rows"]), int(doc["cols"])
    flat = [decode_complex(p) for p in doc["data"]]
    if len(flat) != rows * cols:
        raise ValueError("matrix payload has the wrong length")
    return np.array(flat, dtype=complex).reshape(rows, cols)


def encode_vector(v) -> dict:
    v = np.asarray(v, dtype=complex).ravel()
    return {"length": v.size, "data": [encode_complex(z) for z in v]}


def decode_vector(doc) -> np.ndarray:
    flat = [decode_complex(p) for p in doc["data"]]
    if len(flat) != int(doc["length"]):
        raise ValueError("vector payload has the wrong length")
    return np.array(flat, dtype=complex)
