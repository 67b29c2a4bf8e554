"""SVG codec: parse a practical SVG subset, simplify to M/L/C on the
100x100 grid, serialize canonically, and rasterize for metrics."""

from .errors import CodecError, SvgParseError, UnsupportedFeatureError
from .parse import KAPPA, parse_svg
from .quantize import normalize_and_quantize
from .raster import available_backends, backend_name, rasterize
from .serialize import serialize_svg

__all__ = [
    "CodecError",
    "SvgParseError",
    "UnsupportedFeatureError",
    "KAPPA",
    "parse_svg",
    "normalize_and_quantize",
    "rasterize",
    "serialize_svg",
    "backend_name",
    "available_backends",
]
