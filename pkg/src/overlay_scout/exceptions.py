"""Exception hierarchy shared by all overlay_scout modules."""


class OverlayScoutError(Exception):
    """Base class for every error raised by this package."""


class ParseError(OverlayScoutError, ValueError):
    """Input text does not follow the expected line format."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(OverlayScoutError, ValueError):
    """Input is well-formed but violates a data invariant."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class TransportError(OverlayScoutError, OSError):
    """The bulk whois exchange failed or the server broke the protocol."""


class PartialResponseError(TransportError):
    """The server answered, but not for every requested address."""

    def __init__(self, unresolved):
        self.unresolved = list(unresolved)
        super().__init__(
            f"{len(self.unresolved)} address(es) missing from response: "
            + ", ".join(self.unresolved)
        )


class NoPathError(OverlayScoutError, LookupError):
    """A required measured leg or graph path does not exist."""



class UnknownAsnError(OverlayScoutError, LookupError):
    """The AS of a host or router cannot be determined."""
