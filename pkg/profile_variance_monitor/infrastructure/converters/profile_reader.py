import re
from collections.abc import Iterable, Iterator
from pathlib import Path

import numpy as np

from profile_variance_monitor.application.ports.profile_source import ProfileSourcePort
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.input_exceptions import (
    ProfileFormatError,
    ProfileLengthMismatchError,
)
from profile_variance_monitor.domain.exceptions.wavelet_exceptions import (
    InvalidProfileError,
    NonDyadicLengthError,
)
from profile_variance_monitor.domain.models.profile import Profile

logger = StructuredLogger(__name__)

_SEPARATOR = re.compile(r"[,\s]+")


class DelimitedProfileReader(ProfileSourcePort):
    """
    Streams profiles from text: one profile per line, values separated by
    commas and/or whitespace. Blank lines and ``#`` comments are skipped.

    Profiles are parsed lazily so monitoring never holds more than one
    profile in memory.
    """

    def __init__(self, lines: Iterable[str]):
        self._lines = lines

    @classmethod
    def from_path(cls, path: str | Path) -> "DelimitedProfileReader":
        return cls(_read_lines(Path(path)))

    def profiles(self, n: int) -> Iterator[Profile]:
        position = 0
        for line_number, raw in enumerate(self._lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            values = self.parse_line(line, line_number)
            if values.size != n:
                raise ProfileLengthMismatchError(line_number, n, values.size)
            position += 1
            try:
                yield Profile(values, index=position)
            except (InvalidProfileError, NonDyadicLengthError) as e:
                raise ProfileFormatError(line_number, e.message) from e
        logger.debug("Profile stream exhausted", profiles=position)

    @staticmethod
    def parse_line(line: str, line_number: int) -> np.ndarray:
        tokens = [token for token in _SEPARATOR.split(line) if token]
        try:
            values = np.array([float(token) for token in tokens], dtype=float)
        except ValueError as e:
            raise ProfileFormatError(line_number, f"non-numeric value ({e})") from e
        if not np.all(np.isfinite(values)):
            raise ProfileFormatError(line_number, "values must be finite")
        return values


def _read_lines(path: Path) -> Iterator[str]:
    with path.open() as handle:
        yield from handle
