import numpy as np
import pytest

from trackagg.geometry import Trajectory
from trackagg.io import (DataError, parse_gpx, read_csv, write_csv, write_gpx)

MINIMAL_GPX = """<?xml version="1.0"?>
<gpx version="1.1" creator="test">
 <trk><trkseg>
  <trkpt lat="45.0" lon="5.0"/>
  <trkpt lat="45.001" lon="5.001"/>
 </trkseg></trk>
</gpx>
"""

THREE_SEG_GPX = """<?xml version="1.0"?>
<gpx xmlns="http://www.topografix.com/GPX/1/1" version="1.1" creator="test">
 <trk>
  <trkseg>
   <trkpt lat="45.0" lon="5.0"><time>2024-06-01T10:00:00Z</time></trkpt>
   <trkpt lat="45.0005" lon="5.0"><time>2024-06-01T10:00:10Z</time></trkpt>
  </trkseg>
  <trkseg>
   <trkpt lat="45.001" lon="5.0"/>
   <trkpt lat="45.002" lon="5.0"/>
  </trkseg>
 </trk>
 <trk>
  <trkseg>
   <trkpt lat="45.003" lon="5.0"/>
   <trkpt lat="45.004" lon="5.0"/>
  </trkseg>
 </trk>
</gpx>
"""


def test_csv_roundtrip(tmp_path):
    tr = Trajectory(np.array([[0.0, 0.5], [1.25, 2.0], [3.0, -1.0]]),
                    t=[0.0, 1.5, 4.0], ident="roundtrip")
    p = tmp_path / "roundtrip.csv"
    write_csv(tr, p, comments=["unit test"])
    back = read_csv(p)
    assert np.array_equal(back.xy, tr.xy)
    assert np.array_equal(back.t, tr.t)
    assert p.read_text().startswith("# unit test\nx,y,t\n")


def test_csv_without_time(tmp_path):
    tr = Trajectory(np.array([[0.0, 0.0], [1.0, 1.0]]))
    p = tmp_path / "nt.csv"
    write_csv(tr, p)
    back = read_csv(p)
    assert back.t is None
    assert np.array_equal(back.xy, tr.xy)


def test_csv_errors_name_file_and_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n1.0,2.0\noops,3.0\n")
    with pytest.raises(DataError, match=r"bad.csv:3"):
        read_csv(p)
    p2 = tmp_path / "hdr.csv"
    p2.write_text("a,b\n1,2\n")
    with pytest.raises(DataError, match="header"):
        read_csv(p2)
    p3 = tmp_path / "short.csv"
    p3.write_text("x,y\n1.0,2.0\n")
    with pytest.raises(DataError, match="fewer than 2"):
        read_csv(p3)


def test_minimal_gpx(tmp_path):
    p = tmp_path / "min.gpx"
    p.write_text(MINIMAL_GPX)
    trajs = parse_gpx(p)
    assert len(trajs) == 1
    assert len(trajs[0]) == 2
    # ~111 m of latitude, ~78 m of longitude at 45 degrees
    seg = np.linalg.norm(np.diff(trajs[0].xy, axis=0), axis=1)
    assert 120.0 < seg[0] < 150.0


def test_gpx_three_segments_with_namespace(tmp_path):
    p = tmp_path / "three.gpx"
    p.write_text(THREE_SEG_GPX)
    trajs = parse_gpx(p)
    assert len(trajs) == 3
    assert trajs[0].t is not None and trajs[0].t[1] - trajs[0].t[0] == 10.0
    assert trajs[1].t is None


def test_gpx_errors_include_element_path(tmp_path):
    p = tmp_path / "bad.gpx"
    p.write_text('<gpx><trk><trkseg><trkpt lat="91.0" lon="0.0"/>'
                 '<trkpt lat="0.0" lon="0.0"/></trkseg></trk></gpx>')
    with pytest.raises(DataError, match=r"trk\[0\]/trkseg\[0\]/trkpt\[0\]"):
        parse_gpx(p)
    p2 = tmp_path / "empty.gpx"
    p2.write_text("<gpx><trk><trkseg></trkseg></trk></gpx>")
    with pytest.raises(DataError, match="fewer than 2"):
        parse_gpx(p2)
    p3 = tmp_path / "noxml.gpx"
    p3.write_text("not xml at all")
    with pytest.raises(DataError, match="malformed XML"):
        parse_gpx(p3)
    p4 = tmp_path / "notrk.gpx"
    p4.write_text("<gpx></gpx>")
    with pytest.raises(DataError, match="no trk"):
        parse_gpx(p4)


def test_gpx_write_then_parse_roundtrips_within_centimeter(tmp_path):
    rng = np.random.default_rng(6)
    xy = np.cumsum(rng.normal(scale=20.0, size=(50, 2)), axis=0)
    tr = Trajectory(xy, t=np.arange(50.0) * 5.0)
    p = tmp_path / "rt.gpx"
    write_gpx([tr], p, lon0=5.0, lat0=45.0)
    back = parse_gpx(p)
    assert len(back) == 1
    # parse_gpx re-centers on its own bounding box; compare after removing
    # the common translation
    delta = back[0].xy - tr.xy
    residual = delta - delta.mean(axis=0)
    assert np.abs(residual).max() < 0.01
    assert np.array_equal(back[0].t, tr.t)
