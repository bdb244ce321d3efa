"""Exception types raised across the toolkit.

Every error carries enough context (file, line, id) to locate the offending
input; the CLI relies on ``str(exc)`` being a complete diagnostic.
"""


class XmrError(Exception):
    """Base class for all toolkit errors."""


class ParseError(XmrError):
    """A file could not be parsed."""

    def __init__(self, path, detail, line_no=None, byte_offset=None):
        self.path = path
        self.detail = detail
        self.line_no = line_no
        self.byte_offset = byte_offset
        where = str(path)
        if line_no is not None:
            where += f", line {line_no}"
        if byte_offset is not None:
            where += f", byte offset {byte_offset}"
        super().__init__(f"parse error ({where}): {detail}")


class DimensionMismatchError(XmrError):
    """A feature vector does not have the configured dimension."""


class DuplicateIdError(XmrError):
    """Two records share an id that must be unique."""


class StructureError(XmrError):
    """An annotation record violates the required story structure."""


class JoinError(XmrError):
    """An annotated image id has no feature record."""


class EmptyInputError(XmrError):
    """An operation received an empty input it cannot handle."""


class OriginError(XmrError):
    """A transaction has the wrong modality for the operation."""


class ArityError(XmrError):
    """A photo stream does not contain exactly five images."""


class UniverseTooLargeError(XmrError):
    """The brute-force miner refuses item universes it cannot enumerate."""


class ClosureViolationError(XmrError):
    """A frequent-itemset table is missing a required subset."""


class IncompatibleStoreError(XmrError):
    """Rule stores with different feature dimensions cannot be merged."""


class RemapRequiredError(XmrError):
    """Rule stores built over different vocabularies cannot be merged
    directly; items must be remapped to a shared vocabulary first."""


class FormatVersionError(XmrError):
    """A serialized file declares an unsupported format or version."""


class InvariantViolationError(XmrError):
    """A loaded or constructed object violates a type invariant."""


class AlignmentError(XmrError):
    """Inference results and reference labels do not line up by story id."""


class DomainError(XmrError):
    """An argument lies outside the mathematical domain of the operation."""


class BoundsError(XmrError):
    """A normalization bound pair is empty or inverted."""
