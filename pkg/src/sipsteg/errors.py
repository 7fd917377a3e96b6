"""Exception hierarchy shared by every sipsteg module."""

from __future__ import annotations


class SipStegError(Exception):
    """Base class for all toolkit errors."""


class MalformedMessage(SipStegError, ValueError):
    """Input bytes are not a usable SIP carrier."""


class ConfigViolation(SipStegError, ValueError):
    """A channel configuration breaks a protocol or codec constraint."""


class ChannelAbsent(SipStegError):
    """The carrier field a channel needs is missing from the message."""


class DuplicateReorderableHeader(ChannelAbsent):
    """A header in the reorderable set appears more than once."""


class ExtractionError(SipStegError):
    """Covert data could not be recovered from a carrier."""


class SymbolNotInAlphabet(ExtractionError, ValueError):
    """A carrier field is not shaped like the channel's encoding."""


class TruncatedStream(ExtractionError):
    """A framed stream declares more bits than it holds."""


class AlphabetTooSmall(SipStegError, ValueError):
    pass


class IndexOutOfRange(SipStegError, ValueError):
    pass


class NotAPermutation(SipStegError, ValueError):
    pass


class PayloadTooLong(SipStegError, ValueError):
    pass


class PayloadExceedsCapacity(SipStegError):
    """The payload does not fit the available covert capacity."""

    def __init__(self, needed: int, available: int):
        super().__init__(f"payload needs {needed} bits but only {available} are available")
        self.needed = needed
        self.available = available
