"""Exception hierarchy shared across the package.

Every error the CLI maps to an exit code lives here; modules raise these
rather than bare ValueError so callers can route failures uniformly.
"""


class KTrackError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(KTrackError, ValueError):
    """A numeric parameter is outside its allowed domain."""


class DegenerateUpdateError(KTrackError):
    """Innovation covariance is numerically singular; the measurement
    cannot be applied and should be treated as failed."""


class LookaheadUnavailableError(KTrackError):
    """Linear interpolation was queried without a buffered next keyframe."""


class InvalidSpecError(KTrackError, ValueError):
    """A trajectory spec has degenerate parameters."""


class UndefinedMetricError(KTrackError):
    """A metric has an empty denominator (e.g. zero visible pairs)."""


class ParseError(KTrackError):
    """A data file violates its schema; message carries line/field context."""


class UnsupportedVersionError(ParseError):
    """A data file declares a version this build does not read."""


class ProtocolError(KTrackError):
    """A tracker response violates the per-point measurement contract."""


class TransportError(KTrackError):
    """Frame-level failure of an external tracker session (timeout,
    malformed or partial response, dead process)."""


class SessionOpenError(TransportError):
    """Spawning or handshaking an external adapter failed."""


class VersionMismatchError(SessionOpenError):
    """Adapter answered the handshake with an unsupported protocol version."""


class TrackerReportedError(KTrackError):
    """The adapter answered with an explicit error message."""

    def __init__(self, code: str, message: str):
        super().__init__(f"tracker error [{code}]: {message}")
        self.code = code
        self.message = message


class NothingToPlotError(KTrackError):
    """Chart emission was asked to render an empty results slice."""
