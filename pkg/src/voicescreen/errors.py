"""Exception types shared across the package.

Every error raised on a contract violation subclasses VoicescreenError so
callers (and the CLI) can map failures to exit codes without string matching.
"""


class VoicescreenError(Exception):
    """Base class for all package errors."""


class InvalidInput(VoicescreenError):
    """A precondition on an argument was violated."""


class InvalidSpec(InvalidInput):
    """A synthesis spec field is out of range."""


# --- audio decoding / framing ---

class MalformedContainer(VoicescreenError):
    """File is not a well-formed RIFF/WAVE container."""


class UnsupportedEncoding(VoicescreenError):
    """WAV encoding other than PCM 16-bit or IEEE float 32-bit mono/stereo."""


class EmptyAudio(VoicescreenError):
    """Decoded audio contains zero samples."""


class SignalTooShort(VoicescreenError):
    """Signal shorter than one analysis frame."""


# --- voice-quality analysis ---

class NoVoicedRegion(VoicescreenError):
    """Pitch track contains no voiced frame."""


class TooFewPeriods(VoicescreenError):
    """Fewer than two pitch periods available."""


class NonpositiveAmplitude(VoicescreenError):
    """Period amplitudes must be positive for dB ratios."""


class EmptyTrack(VoicescreenError):
    """Functionals need a non-empty value track."""


# --- embedding / manifest ingestion ---

class DimensionMismatch(VoicescreenError):
    """Vector length differs from the declared dimension."""


class DuplicateId(VoicescreenError):
    """The same recording id appears twice."""


class EmptyFile(VoicescreenError):
    """File holds no records."""


class NonFiniteValue(VoicescreenError):
    """NaN or infinity where a finite real is required."""


class MissingId(VoicescreenError):
    """A manifest id is absent from an embedding set."""


class EmptySequence(VoicescreenError):
    """Pooling requires at least one frame vector."""


class ScoreOutOfRange(VoicescreenError):
    """GAD-7 score outside 0..21."""


class MalformedLine(VoicescreenError):
    """A JSONL line failed to parse or validate."""


class EmptyClass(VoicescreenError):
    """A split request found a class with no members."""


# --- learners / metrics ---

class SingleClass(VoicescreenError):
    """Training or ranking needs both classes present."""


class NonpositiveWeight(VoicescreenError):
    """Sample weights must be strictly positive."""


class WrongModelKind(VoicescreenError):
    """Operation defined for a different model family."""


class NoPositives(VoicescreenError):
    """Precision-recall needs at least one positive label."""


# --- pipeline / CLI ---

class ConfigError(VoicescreenError):
    """Experiment configuration is invalid or incomplete."""


class MissingInput(VoicescreenError):
    """A required input file does not exist."""


class IoFailure(VoicescreenError):
    """Filesystem write failed."""
