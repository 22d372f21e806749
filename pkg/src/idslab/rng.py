"""Counter-based uniform streams.

Every uniform is addressed by ``(seed, stream, realization, index)`` and is
computed from a Philox block cipher, so a disorder field can be regenerated
site by site, in any order, by any worker, with identical bits.
"""

import numpy as np

_WORDS_PER_BLOCK = 4
_MASK64 = (1 << 64) - 1


def _to_unit(raw):
    # 53 high bits, shifted to the open interval (0, 1)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


class CounterStream:
    """Deterministic source of uniforms keyed by ``(seed, stream)``.

    Parameters
    ----------
    seed : int
        Master seed (reduced modulo 2**64).
    stream : int
        Independent sub-stream tag, e.g. one per use site in a pipeline.
    """

    def __init__(self, seed, stream=0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64

    def __repr__(self):
        return f"CounterStream(seed={self.seed}, stream={self.stream})"

    def _bitgen(self, block, realization):
        return np.random.Philox(
            key=[self.seed, self.stream],
            counter=[int(block), int(realization) & _MASK64, 0, 0],
        )

    def uniforms(self, n, realization=0):
        """The first ``n`` uniforms of a realization, as a float array."""
        if n <= 0:
            return np.empty(0)
        return _to_unit(self._bitgen(0, realization).random_raw(int(n)))

    def uniform_at(self, index, realization=0):
        """Uniform(s) at explicit word indices; equal to ``uniforms(...)[index]``."""
        idx = np.asarray(index, dtype=np.int64)
        flat = idx.ravel()
        out = np.empty(flat.shape, dtype=np.float64)
        for i, k in enumerate(flat):
            block, offset = divmod(int(k), _WORDS_PER_BLOCK)
            words = self._bitgen(block, realization).random_raw(_WORDS_PER_BLOCK)
            out[i] = _to_unit(words[offset : offset + 1])[0]
        return out.reshape(idx.shape)
