"""Pure numpy versions of the prefix-sum sweeps in ``_ckernels``."""
import numpy as np

# rows per block so a block of terms stays around 32 MiB
_BLOCK_ELEMS = 1 << 21


def _sweep(terms):
    partial = np.cumsum(terms, axis=1)
    sq = partial.real * partial.real + partial.imag * partial.imag
    arg = np.argmax(sq, axis=1)
    best = sq[np.arange(sq.shape[0]), arg]
    return np.sqrt(best), arg.astype(np.int64)


def _blocked(n_rows, n_cols, make_terms):
    maxima = np.zeros(n_rows, dtype=np.float64)
    argmax = np.zeros(n_rows, dtype=np.int64)
    if n_cols == 0:
        return maxima, argmax
    step = max(1, _BLOCK_ELEMS // n_cols)
    for start in range(0, n_rows, step):
        stop = min(n_rows, start + step)
        maxima[start:stop], argmax[start:stop] = _sweep(make_terms(start, stop))
    return maxima, argmax


def max_partial_phase(coef, freq, points, modulus, roots):
    coef = np.asarray(coef, dtype=np.complex128)
    freq = np.asarray(freq, dtype=np.int64)
    points = np.asarray(points, dtype=np.int64) % modulus

    def make_terms(start, stop):
        idx = np.outer(points[start:stop], freq) % modulus
        return coef[None, :] * roots[idx]

    return _blocked(points.shape[0], coef.shape[0], make_terms)


def max_partial_table(coef, table):
    coef = np.asarray(coef, dtype=np.complex128)
    table = np.asarray(table, dtype=np.complex128)
    return _blocked(table.shape[0], table.shape[1],
                    lambda start, stop: coef[None, :] * table[start:stop])
