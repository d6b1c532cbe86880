"""Counter-based random streams keyed by (master seed, realization index).

Every stochastic draw in the package goes through a Philox generator whose
key is (master_seed, stream id) and whose counter encodes the realization
index. Realizations are therefore reproducible independent of execution
order, chunking, or worker count.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError

# Stream ids: one independent substream per physical noise source.
STREAM_SLM = 0
STREAM_PHASE_SCREEN = 1
STREAM_OBJECT_ROUGHNESS = 3  # 2 reserved

_MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class RealizationKey:
    """Addresses one Monte Carlo realization of an ensemble."""

    master_seed: int
    realization_index: int

    def __post_init__(self) -> None:
        if not (0 <= int(self.master_seed) < _MAX_SEED):
            raise InvalidParamsError("master_seed must fit in 64 unsigned bits")
        if int(self.realization_index) < 0:
            raise InvalidParamsError("realization_index must be nonnegative")


def stream_generator(key: RealizationKey, stream: int) -> np.random.Generator:
    """Return the generator for one (key, stream) pair.

    The same arguments always produce the same draw sequence, regardless of
    what was generated before.
    """
    bitgen = np.random.Philox(
        key=[int(key.master_seed), int(stream)],
        counter=[0, 0, 0, int(key.realization_index)],
    )
    return np.random.Generator(bitgen)


def complex_normal_block(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw an n-by-n circular complex Gaussian block, E|w|^2 = 2."""
    flat = rng.standard_normal(2 * n * n)
    return flat.view(np.complex128).reshape(n, n)
