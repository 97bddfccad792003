"""Trajectory file formats: the x,y,t CSV and a GPX subset.

CSV: header ``x,y,t`` (t optional, seconds), one point per row, ``#``
comments. GPX: trk/trkseg/trkpt with lat/lon attributes and an optional
time child; coordinates are projected to a local planar metric frame
centered on the bounding-box centroid.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .geometry import Trajectory

EARTH_RADIUS_M = 6378137.0


class DataError(ValueError):
    """Unparseable or out-of-range input data."""


def write_csv(traj: Trajectory, path, comments: list[str] | None = None) -> None:
    lines = [f"# {c}" for c in (comments or [])]
    if traj.t is not None:
        lines.append("x,y,t")
        lines += [f"{float(x)!r},{float(y)!r},{float(t)!r}"
                  for (x, y), t in zip(traj.xy, traj.t)]
    else:
        lines.append("x,y")
        lines += [f"{float(x)!r},{float(y)!r}" for x, y in traj.xy]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> Trajectory:
    path = Path(path)
    rows, times = [], []
    header = None
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = [c.strip().lower() for c in line.split(",")]
            if header[:2] != ["x", "y"]:
                raise DataError(f"{path}:{lineno}: expected header starting 'x,y'")
            continue
        fields = line.split(",")
        try:
            rows.append((float(fields[0]), float(fields[1])))
            if len(header) > 2 and len(fields) > 2 and fields[2] != "":
                times.append(float(fields[2]))
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}:{lineno}: bad row {line!r}: {exc}") from exc
    if len(rows) < 2:
        raise DataError(f"{path}: fewer than 2 points")
    t = np.array(times) if times and len(times) == len(rows) else None
    try:
        return Trajectory.from_points(rows, t, ident=path.stem)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


# --- GPX ------------------------------------------------------------------

def project_lonlat(lon, lat, lon0: float, lat0: float):
    """Local planar projection (meters) centered on (lon0, lat0)."""
    lon, lat = np.asarray(lon, dtype=float), np.asarray(lat, dtype=float)
    x = EARTH_RADIUS_M * np.radians(lon - lon0) * math.cos(math.radians(lat0))
    y = EARTH_RADIUS_M * np.radians(lat - lat0)
    return x, y


def unproject_xy(x, y, lon0: float, lat0: float):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    lon = lon0 + np.degrees(x / (EARTH_RADIUS_M * math.cos(math.radians(lat0))))
    lat = lat0 + np.degrees(y / EARTH_RADIUS_M)
    return lon, lat


def _strip(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_time(text: str) -> float:
    return datetime.fromisoformat(text.replace("Z", "+00:00")).timestamp()


def parse_gpx(path) -> list[Trajectory]:
    """One Trajectory per trkseg, in a shared local planar frame."""
    path = Path(path)
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise DataError(f"{path}: malformed XML: {exc}") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    segments = []  # (seg_path, [(lat, lon, time|None)])
    for ti, trk in enumerate(e for e in root.iter() if _strip(e.tag) == "trk"):
        for si, seg in enumerate(e for e in trk.iter() if _strip(e.tag) == "trkseg"):
            where = f"trk[{ti}]/trkseg[{si}]"
            pts = []
            for pi, pt in enumerate(e for e in seg.iter() if _strip(e.tag) == "trkpt"):
                try:
                    lat = float(pt.attrib["lat"])
                    lon = float(pt.attrib["lon"])
                except (KeyError, ValueError) as exc:
                    raise DataError(f"{path}: {where}/trkpt[{pi}]: bad lat/lon: {exc}") from exc
                if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                    raise DataError(f"{path}: {where}/trkpt[{pi}]: coordinates out of range")
                tnode = next((e for e in pt if _strip(e.tag) == "time"), None)
                t = _parse_time(tnode.text.strip()) if tnode is not None and tnode.text else None
                pts.append((lat, lon, t))
            if len(pts) < 2:
                raise DataError(f"{path}: {where}: fewer than 2 track points")
            segments.append((where, pts))
    if not segments:
        raise DataError(f"{path}: no trk/trkseg found")

    lats = [p[0] for _, seg in segments for p in seg]
    lons = [p[1] for _, seg in segments for p in seg]
    lat0 = (min(lats) + max(lats)) / 2.0
    lon0 = (min(lons) + max(lons)) / 2.0

    out = []
    for where, seg in segments:
        x, y = project_lonlat([p[1] for p in seg], [p[0] for p in seg], lon0, lat0)
        times = [p[2] for p in seg]
        t = np.array(times, dtype=float) if all(v is not None for v in times) else None
        try:
            out.append(Trajectory.from_points(np.column_stack([x, y]), t, ident=f"{path.stem}:{where}"))
        except ValueError as exc:
            raise DataError(f"{path}: {where}: {exc}") from exc
    return out


def write_gpx(trajs: list[Trajectory], path, lon0: float, lat0: float) -> None:
    """Inverse of parse_gpx's projection; mainly for tests and interchange."""
    gpx = ET.Element("gpx", version="1.1", creator="trackagg")
    for traj in trajs:
        trk = ET.SubElement(gpx, "trk")
        seg = ET.SubElement(trk, "trkseg")
        lon, lat = unproject_xy(traj.xy[:, 0], traj.xy[:, 1], lon0, lat0)
        for k in range(len(traj)):
            pt = ET.SubElement(seg, "trkpt", lat=repr(float(lat[k])), lon=repr(float(lon[k])))
            if traj.t is not None:
                tnode = ET.SubElement(pt, "time")
                tnode.text = datetime.fromtimestamp(traj.t[k], tz=timezone.utc).isoformat()
    ET.ElementTree(gpx).write(path, xml_declaration=True, encoding="unicode")
