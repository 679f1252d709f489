"""Seeded, counter-based random streams.

Uniforms come from the Philox4x64-10 counter-based generator keyed by
``(seed, stream_id)``; the counter starts at zero for each stream. A raw
64-bit word ``x`` becomes the open-interval uniform ``((x >> 11) + 0.5) / 2**53``.
Normals are obtained by the inverse CDF (Wichura's AS241, PPND16).
Nothing here uses NumPy's ``Generator`` distributions, whose output is not
guaranteed stable across versions; only the Philox bit stream is used.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# stream tags used to derive independent sub-streams from a master seed
SAMPLING = 1
SUBSAMPLE = 2
PIPELINE = 3
GENERATOR = 4


def stream_id(tag: int, index: int = 0) -> int:
    """Combine a tag and an index into one 64-bit stream id: ``tag << 32 | index``."""
    if not (0 <= tag < 2**32 and 0 <= index < 2**32):
        raise ValueError("tag and index must fit in 32 bits")
    return (tag << 32) | index


def raw_words(seed: int, stream: int, size: int) -> np.ndarray:
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Philox(key=key).random_raw(size)


class Stream:
    """Sequential draws from one keyed Philox stream.

    Successive calls continue the counter, so a fixed sequence of calls is
    reproducible. Used for synthetic model construction.
    """

    def __init__(self, seed: int, stream: int = 0):
        key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
        self._bits = np.random.Philox(key=key)

    def _words(self, size: int) -> np.ndarray:
        return self._bits.random_raw(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        n = 1 if size is None else int(np.prod(size))
        u = _to_unit(self._words(n))
        out = low + (high - low) * u
        return float(out[0]) if size is None else out.reshape(size)

    def normal(self, size=None):
        n = 1 if size is None else int(np.prod(size))
        z = norm_ppf(_to_unit(self._words(n)))
        return float(z[0]) if size is None else z.reshape(size)

    def integers(self, low: int, high: int) -> int:
        """One integer in ``[low, high)``."""
        return low + int(self.uniform() * (high - low))

    def choice(self, seq):
        return seq[self.integers(0, len(seq))]

    def permutation(self, n: int) -> np.ndarray:
        idx = np.arange(n)
        u = self.uniform(size=n)
        for i in range(n):
            j = i + int(u[i] * (n - i))
            idx[i], idx[j] = idx[j], idx[i]
        return idx


def _to_unit(words: np.ndarray) -> np.ndarray:
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def uniforms(seed: int, stream: int, size: int) -> np.ndarray:
    """``size`` uniforms strictly inside (0, 1)."""
    return _to_unit(raw_words(seed, stream, size))


_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _horner(coef, x):
    out = np.full_like(x, coef[-1])
    for c in reversed(coef[:-1]):
        out = out * x + c
    return out


def norm_ppf(p) -> np.ndarray:
    """Standard normal quantile function (AS241 PPND16, ~1e-16 relative accuracy)."""
    p = np.asarray(p, dtype=np.float64)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    q = p - 0.5
    out = np.empty_like(p)

    central = np.abs(q) <= 0.425
    r = 0.180625 - q[central] ** 2
    out[central] = q[central] * _horner(_A, r) / _horner(_B, r)

    tail = ~central
    r = np.sqrt(-np.log(np.minimum(p[tail], 1.0 - p[tail])))
    near = r <= 5.0
    val = np.empty_like(r)
    rn = r[near] - 1.6
    val[near] = _horner(_C, rn) / _horner(_D, rn)
    rf = r[~near] - 5.0
    val[~near] = _horner(_E, rf) / _horner(_F, rf)
    out[tail] = np.where(q[tail] < 0, -val, val)
    return out


def standard_normals(seed: int, stream: int, size: int) -> np.ndarray:
    return norm_ppf(uniforms(seed, stream, size))


def sample_without_replacement(seed: int, stream: int, n: int, k: int) -> np.ndarray:
    """First ``k`` positions of a partial Fisher-Yates shuffle of ``range(n)``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    idx = np.arange(n)
    u = uniforms(seed, stream, k)
    for i in range(k):
        j = i + int(u[i] * (n - i))
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:k].copy()
