"""Dynamic community tracking on snapshot series."""

from ._core import (
    CommtrackError,
    SnapshotSeries,
    __version__,
    baseline_track,
    detect,
    detect_series,
    events,
    generate_benchmark,
    hashtags_overlap,
    jaccard,
    load_partitions,
    load_snapshots,
    modularity,
    nmi,
    overlap_coefficient,
    parse_snapshots,
    parse_utc_day,
    partitions_to_text,
    run_protocol,
    similarity_edges,
    track,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
