"""Pure-Python implementations of the hot 2x2 kernels.

Mirrors ``_kernels.pyx`` function for function. Used when the compiled
extension is unavailable or ``SL2ORBIT_PURE_PYTHON`` is set.
"""

import numpy as np


def _mul(p, q):
    a, b, c, d = p
    e, f, g, h = q
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _entries(mats, i):
    m = mats[i]
    return (complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))


def chain_product(mats, idx):
    """Ordered product ``mats[idx[0]] @ mats[idx[1]] @ ...`` (identity if empty)."""
    acc = (1 + 0j, 0j, 0j, 1 + 0j)
    for i in idx:
        acc = _mul(acc, _entries(mats, int(i)))
    return np.array([[acc[0], acc[1]], [acc[2], acc[3]]], dtype=complex)


def chain_traces(mats, idx, offsets):
    """Trace of each segment ``idx[offsets[w]:offsets[w + 1]]``."""
    ents = [_entries(mats, i) for i in range(mats.shape[0])]
    out = np.empty(len(offsets) - 1, dtype=complex)
    for w in range(len(offsets) - 1):
        acc = (1 + 0j, 0j, 0j, 1 + 0j)
        for p in range(offsets[w], offsets[w + 1]):
            acc = _mul(acc, ents[int(idx[p])])
        out[w] = acc[0] + acc[3]
    return out


def lex_traces(mats):
    """Traces over singles, ordered pairs j<k and triples j<k<l, lex order."""
    n = mats.shape[0]
    ents = [_entries(mats, i) for i in range(n)]
    out = []
    for m in ents:
        out.append(m[0] + m[3])
    pairs = {}
    for j in range(n):
        for k in range(j + 1, n):
            p = _mul(ents[j], ents[k])
            pairs[j, k] = p
            out.append(p[0] + p[3])
    for j in range(n):
        for k in range(j + 1, n):
            p = pairs[j, k]
            for l in range(k + 1, n):
                q = ents[l]
                out.append(p[0] * q[0] + p[1] * q[2] + p[2] * q[1] + p[3] * q[3])
    return np.array(out, dtype=complex)


def conjugate_all(g, ginv, mats):
    """Stack of ``g @ m @ ginv`` for every ``m`` in ``mats``."""
    ge = (complex(g[0, 0]), complex(g[0, 1]), complex(g[1, 0]), complex(g[1, 1]))
    gi = (complex(ginv[0, 0]), complex(ginv[0, 1]), complex(ginv[1, 0]), complex(ginv[1, 1]))
    out = np.empty_like(mats, dtype=complex)
    for i in range(mats.shape[0]):
        r = _mul(_mul(ge, _entries(mats, i)), gi)
        out[i, 0, 0], out[i, 0, 1], out[i, 1, 0], out[i, 1, 1] = r
    return out
