"""Channel, pilot codebook, and jamming-sequence generation."""

import functools
from dataclasses import dataclass

import numpy as np

JAMMER_KINDS = ("absent", "random_gaussian", "random_unit_sphere", "deterministic")


def crandn(rng, *shape) -> np.ndarray:
    """Circularly symmetric complex normal draws with unit per-entry variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def gen_channel(rng, m: int, beta: float) -> np.ndarray:
    """Length-m i.i.d. CN(0, beta) channel vector.

    Real and imaginary parts of each entry are independent zero-mean
    Gaussians with variance beta/2.
    """
    if m < 1:
        raise ValueError(f"antenna count must be positive, got {m}")
    if beta <= 0:
        raise ValueError(f"large-scale fading must be positive, got {beta}")
    return np.sqrt(beta) * crandn(rng, m)


@dataclass(frozen=True)
class PilotCodebook:
    """tau orthonormal pilot sequences of length tau, one per row."""

    tau: int
    codewords: np.ndarray  # (tau, tau), read-only

    def __len__(self) -> int:
        return self.tau

    def __getitem__(self, k: int) -> np.ndarray:
        return self.codewords[k]


@functools.lru_cache(maxsize=None)
def make_codebook(tau: int) -> PilotCodebook:
    """Deterministic orthonormal constant-modulus pilot family.

    Rows of the normalized DFT matrix: unit norm, pairwise orthogonal, and
    every entry has modulus 1/sqrt(tau) so pilot energy is spread evenly
    over the training symbols.
    """
    if tau < 1:
        raise ValueError(f"pilot length must be positive, got {tau}")
    grid = np.arange(tau)
    codewords = np.exp(-2j * np.pi * np.outer(grid, grid) / tau) / np.sqrt(tau)
    codewords.setflags(write=False)
    return PilotCodebook(tau=tau, codewords=codewords)


@dataclass(frozen=True)
class JammerModel:
    """What the jammer transmits during training.

    Random kinds redraw a fresh sequence on every call; the deterministic
    kind replays a fixed sequence; absent yields the zero sequence. The
    data_phase_active flag says whether the jammer also transmits during
    payload symbols.
    """

    kind: str = "random_gaussian"
    sequence: np.ndarray | None = None
    data_phase_active: bool = True

    def __post_init__(self):
        if self.kind not in JAMMER_KINDS:
            raise ValueError(f"unknown jammer kind {self.kind!r}")
        if self.kind == "deterministic":
            if self.sequence is None:
                raise ValueError("deterministic jammer needs a sequence")
            if not np.all(np.isfinite(self.sequence)):
                raise ValueError("deterministic jamming sequence must be finite")
        elif self.sequence is not None:
            raise ValueError(f"jammer kind {self.kind!r} does not take a stored sequence")

    @classmethod
    def absent(cls) -> "JammerModel":
        return cls(kind="absent", data_phase_active=False)

    @classmethod
    def random_gaussian(cls, data_phase_active: bool = True) -> "JammerModel":
        return cls(kind="random_gaussian", data_phase_active=data_phase_active)

    @classmethod
    def random_unit_sphere(cls, data_phase_active: bool = True) -> "JammerModel":
        return cls(kind="random_unit_sphere", data_phase_active=data_phase_active)

    @classmethod
    def deterministic(cls, sequence, data_phase_active: bool = True) -> "JammerModel":
        seq = np.asarray(sequence, dtype=np.complex128)
        return cls(kind="deterministic", sequence=seq, data_phase_active=data_phase_active)


def draw_jammer_sequence(rng, model: JammerModel, tau: int) -> np.ndarray:
    """One training-phase jamming sequence of length tau.

    random_gaussian draws i.i.d. CN(0, 1/tau) entries and
    random_unit_sphere normalizes a Gaussian draw to unit norm, so both
    satisfy E{||s_j||^2} = 1.
    """
    if tau < 1:
        raise ValueError(f"pilot length must be positive, got {tau}")
    if model.kind == "absent":
        return np.zeros(tau, dtype=np.complex128)
    if model.kind == "random_gaussian":
        return crandn(rng, tau) / np.sqrt(tau)
    if model.kind == "random_unit_sphere":
        seq = crandn(rng, tau)
        return seq / np.linalg.norm(seq)
    if len(model.sequence) != tau:
        raise ValueError(
            f"stored jamming sequence has length {len(model.sequence)}, expected {tau}")
    return model.sequence


def jamming_overlap_sq(s_j: np.ndarray, s_u: np.ndarray) -> float:
    """Squared overlap |s_j^T s_u*|^2 between jamming and pilot sequences."""
    if len(s_j) != len(s_u):
        raise ValueError("sequence lengths differ")
    return float(np.abs(np.dot(s_j, np.conj(s_u))) ** 2)
