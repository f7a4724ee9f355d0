"""snapshothub: live dashboard snapshots for collaboration platforms.

Turns dashboard selections into templated, annotated, permission-gated
snapshot components; composes and versions them immutably; posts them into
emulated channels; keeps them fresh through relative time frames and a
scheduler; and tracks engagement and propagation.
"""

from .canonical import canonical_hash, canonical_json
from .clock import Clock
from .datacore import (
    Dashboard,
    Dataset,
    Field,
    FilterPredicate,
    ResolvedTable,
    Selection,
    Widget,
    aggregate,
    apply_filters,
    extract_selection,
    load_dataset,
    resolve_selection,
)
from .errors import (
    Conflict,
    Forbidden,
    NotFoundError,
    SnapshotHubError,
    StorageError,
    ValidationError,
)
from .hub import Hub, HubConfig
from .snapshots import (
    Annotation,
    Curation,
    InteractivityControl,
    SnapshotComponent,
    SnapshotStore,
    SnapshotVersion,
    Status,
    UpdatePolicy,
    build_component,
    compute_status,
)
from .telemetry import TelemetryLog, home_feed, propagation
from .templates import (
    Caption,
    ChartSpec,
    TemplateParams,
    apply_color_scale,
    instantiate,
    preserve_original,
    render_caption_stats,
    responsive_variant,
    size_class_for_width,
)
from .timeframe import (
    Bucket,
    DateRange,
    Span,
    TimeFrame,
    advance,
    bucketize,
    detect_gaps,
    infer_freshness,
    resolve_range,
    restrict_weekdays,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
