"""Mean-field (factorized expectation-value) dynamics of the atom and N modes."""  # noqa: N999

from .equations import derivatives, pairwise_sum
from .integrator import integrate
from .spectrogram import Spectrogram, onset_times, spectrogram
from .state import MeanFieldState, Trajectory

__all__ = [
    "MeanFieldState",
    "Spectrogram",
    "Trajectory",
    "derivatives",
    "integrate",
    "onset_times",
    "pairwise_sum",
    "spectrogram",
]
