"""Exception hierarchy shared by every StegoVault module."""


class StegoVaultError(Exception):
    """Base class for all StegoVault failures."""


class ConfigError(StegoVaultError, ValueError):
    """Invalid settings, parameters or key material sizes."""


class FormatError(StegoVaultError, ValueError):
    """A byte stream does not follow the format it claims to be."""


class UnsafePathError(FormatError):
    """An archive path would escape the extraction folder."""


class IntegrityError(StegoVaultError):
    """A checksum or padding check failed after decoding."""


class WrongKeyError(StegoVaultError):
    """The key file could not be opened with the supplied private key."""


class UnsupportedCoverError(StegoVaultError):
    """The cover is a well-formed file of a kind we refuse to embed into."""


class NotStegoError(StegoVaultError):
    """No valid stego header was found in the object."""


class AuditError(StegoVaultError):
    """A stego object changed bytes it was not allowed to change."""


class CapacityError(StegoVaultError):
    """The payload does not fit the cover at the requested k."""

    def __init__(self, need: int, have: int):
        self.need = need
        self.have = have
        super().__init__(
            f"payload needs {need} bytes but the cover holds only {have} bytes"
        )
