"""CSV emission for misdetection maps and sweep tables.

Every file opens with ``#``-prefixed metadata lines followed by a regular
CSV header. Number formatting is fixed so reruns are byte-identical.
"""

import csv
import io
from collections.abc import Iterable
from pathlib import Path

from irsdetect.services.detector import DetectionStats
from irsdetect.services.simulation import MdMap, SweepRow
from irsdetect.utils.logging import get_logger

logger = get_logger("storage.csv_writer")

MAP_COLUMNS = ("y", "z", "gamma", "md")
SWEEP_COLUMNS = ("size_or_rho", "design", "md", "ci")
STATS_COLUMNS = ("kind", "false_alarm", "md", "gamma", "trials", "ci")


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _render(meta: dict[str, str], columns: tuple[str, ...], rows: Iterable[tuple[str, ...]]) -> str:
    buffer = io.StringIO()
    for key, value in meta.items():
        buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def _header(scenario_hash: str, seed: int, extra: dict[str, str] | None) -> dict[str, str]:
    return {"scenario_hash": scenario_hash, "seed": str(seed), **(extra or {})}


def format_map(md_map: MdMap, *, scenario_hash: str, seed: int, extra: dict[str, str] | None = None) -> str:
    """Render a map as ``y,z,gamma,md`` rows in grid order."""
    meta = _header(scenario_hash, seed, {"design": md_map.design, **(extra or {})})
    rows = ((_fmt(y), _fmt(z), _fmt(g), _fmt(md)) for y, z, g, md in md_map.rows())
    return _render(meta, MAP_COLUMNS, rows)


def format_sweep(
    rows: list[SweepRow],
    *,
    scenario_hash: str,
    seed: int,
    extra: dict[str, str] | None = None,
) -> str:
    """Render sweep rows as ``size_or_rho,design,md,ci``."""
    body = (
        (_fmt(row.parameter), row.design, _fmt(row.misdetection), _fmt(row.half_width))
        for row in rows
    )
    return _render(_header(scenario_hash, seed, extra), SWEEP_COLUMNS, body)


def format_stats(
    stats: DetectionStats,
    *,
    scenario_hash: str,
    seed: int,
    extra: dict[str, str] | None = None,
) -> str:
    """Render one detection-statistics row."""
    row = (
        stats.kind,
        _fmt(stats.false_alarm),
        _fmt(stats.misdetection),
        _fmt(stats.noncentrality),
        str(stats.trials or 0),
        _fmt(stats.half_width or 0.0),
    )
    return _render(_header(scenario_hash, seed, extra), STATS_COLUMNS, [row])


def write_text(path: Path | str, text: str) -> None:
    """Write CSV text in UTF-8 with ``\\n`` line endings."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {text.count(chr(10))} lines to {path}")
