"""tidewire: data-to-text robot journalism for coastal monitoring.

Converts structured daily observations (weather, tides, vessel counts,
earthquakes, oil extraction) into Brazilian Portuguese report texts through
interchangeable generation architectures, evaluates them, and publishes
them as short-message threads.
"""

__version__ = "0.1.0"

from .ir import (  # noqa: F401
    DEFAULT_REGISTRY,
    IntentDocument,
    Intent,
    build_document,
    linearize,
    parse_ir,
    serialize_ir,
    validate,
)
