"""Text format for phase-shift designs.

A design file starts with ``#``-prefixed ``key: value`` header lines and
holds one ``u_x u_y phase`` line per unit cell in linear cell order.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from irsdetect.exceptions import DesignFileError, DimensionError
from irsdetect.services.designs import DesignSpec
from irsdetect.services.geometry import IrsGeometry
from irsdetect.services.irs_model import PhaseShiftVector
from irsdetect.utils.logging import get_logger

logger = get_logger("storage.design_file")

FORMAT_VERSION = "1"
_REQUIRED_KEYS = ("variant", "u_count_x", "u_count_y")


@dataclass(frozen=True, eq=False)
class DesignFile:
    """A phase-shift design together with the metadata that produced it."""

    w: PhaseShiftVector
    spec: DesignSpec
    u_count_x: int
    u_count_y: int
    scenario_hash: str = ""
    extra: dict[str, str] = field(default_factory=dict)

    def check_geometry(self, geom: IrsGeometry) -> None:
        """Raise if the design does not fit the given surface.

        Raises:
            DimensionError: If the cell counts differ.
        """
        if (self.u_count_x, self.u_count_y) != (geom.u_count_x, geom.u_count_y):
            raise DimensionError(
                f"design is {self.u_count_x}x{self.u_count_y} cells, "
                f"scenario IRS is {geom.u_count_x}x{geom.u_count_y}"
            )


def format_design(
    w: PhaseShiftVector,
    spec: DesignSpec,
    geom: IrsGeometry,
    *,
    scenario_hash: str = "",
    extra: dict[str, str] | None = None,
) -> str:
    """Render a design in the text format.

    Raises:
        DimensionError: If ``w`` does not match ``geom``.
    """
    if len(w) != geom.cell_count:
        raise DimensionError(f"phase-shift vector has {len(w)} entries, IRS has {geom.cell_count} cells")
    header = {
        "format": FORMAT_VERSION,
        "variant": spec.variant,
        "tiles": str(spec.tiles),
        "randomizations": str(spec.randomizations),
        "seed": str(spec.seed),
        "scenario_hash": scenario_hash,
        "u_count_x": str(geom.u_count_x),
        "u_count_y": str(geom.u_count_y),
        **(extra or {}),
    }
    lines = [f"# {key}: {value}" for key, value in header.items()]
    u_x, u_y = geom.cell_indices()
    for i, j, phase in zip(u_x, u_y, w.phases):
        lines.append(f"{int(i)} {int(j)} {float(phase):.17g}")
    return "\n".join(lines) + "\n"


def write_design(
    path: Path | str,
    w: PhaseShiftVector,
    spec: DesignSpec,
    geom: IrsGeometry,
    *,
    scenario_hash: str = "",
    extra: dict[str, str] | None = None,
) -> None:
    """Write a design file in UTF-8."""
    text = format_design(w, spec, geom, scenario_hash=scenario_hash, extra=extra)
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {spec.label} design with {len(w)} cells to {path}")


def _parse_int(header: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in header:
        if default is None:
            raise DesignFileError(f"missing header field {key!r}")
        return default
    try:
        return int(header[key])
    except ValueError as e:
        raise DesignFileError(f"header field {key!r} is not an integer: {header[key]!r}") from e


def parse_design(text: str) -> DesignFile:
    """Parse the text format.

    Raises:
        DesignFileError: On malformed headers or cell lines, missing or
            duplicated cells, or phases that are not finite.
    """
    header: dict[str, str] = {}
    cells: list[tuple[int, int, float]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                header[key.strip()] = value.strip()
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DesignFileError(f"line {number}: expected 'u_x u_y phase', got {raw!r}")
        try:
            cells.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as e:
            raise DesignFileError(f"line {number}: {e}") from e

    for key in _REQUIRED_KEYS:
        if key not in header:
            raise DesignFileError(f"missing header field {key!r}")
    u_count_x = _parse_int(header, "u_count_x")
    u_count_y = _parse_int(header, "u_count_y")
    try:
        geom = IrsGeometry(u_count_x, u_count_y, 1.0, 1.0, 1.0)
        spec = DesignSpec(
            variant=header["variant"],  # type: ignore[arg-type]
            randomizations=_parse_int(header, "randomizations", 3000),
            seed=_parse_int(header, "seed", 0),
            tiles=_parse_int(header, "tiles", 1),
        )
    except ValueError as e:
        raise DesignFileError(str(e)) from e

    if len(cells) != geom.cell_count:
        raise DesignFileError(f"expected {geom.cell_count} cell lines, found {len(cells)}")

    u_x, u_y = geom.cell_indices()
    phases = np.empty(geom.cell_count)
    seen = np.zeros(geom.cell_count, dtype=bool)
    (x_min, _), (y_min, _) = geom.index_bounds
    for i, j, phase in cells:
        u = (j - y_min) * u_count_x + (i - x_min)
        if not (0 <= u < geom.cell_count and u_x[u] == i and u_y[u] == j):
            raise DesignFileError(f"cell ({i}, {j}) outside a {u_count_x}x{u_count_y} surface")
        if seen[u]:
            raise DesignFileError(f"cell ({i}, {j}) listed twice")
        if not np.isfinite(phase):
            raise DesignFileError(f"cell ({i}, {j}) has a non-finite phase")
        seen[u] = True
        phases[u] = phase

    known = set(_REQUIRED_KEYS) | {"format", "tiles", "randomizations", "seed", "scenario_hash"}
    return DesignFile(
        w=PhaseShiftVector.from_phases(phases),
        spec=spec,
        u_count_x=u_count_x,
        u_count_y=u_count_y,
        scenario_hash=header.get("scenario_hash", ""),
        extra={k: v for k, v in header.items() if k not in known},
    )


def read_design(path: Path | str) -> DesignFile:
    """Read a design file.

    Raises:
        DesignFileError: If the file cannot be read or parsed.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DesignFileError(f"cannot read design {path}: {e.strerror}") from e
    try:
        return parse_design(text)
    except DesignFileError as e:
        raise DesignFileError(f"{path}: {e}") from e
