"""Error types raised by the SVG codec."""


class CodecError(ValueError):
    pass


class SvgParseError(CodecError):
    """Malformed SVG/XML or an ill-formed attribute; carries a byte offset."""

    def __init__(self, message: str, byte_offset: int = -1):
        if byte_offset >= 0:
            message = f"{message} (byte offset {byte_offset})"
        super().__init__(message)
        self.byte_offset = byte_offset


class UnsupportedFeatureError(CodecError):
    """An SVG feature outside the supported subset; names the feature."""

    def __init__(self, feature: str):
        super().__init__(f"unsupported SVG feature: {feature}")
        self.feature = feature
