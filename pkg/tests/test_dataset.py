import numpy as np
import pytest

from windsolar.dataset import hourly_moments, ingest, ingest_text
from windsolar.errors import DataFormatError, DataQualityError, ValidationError
from windsolar.synthetic import synthetic_dataset

HEADER = "timestamp,wind_ms,ghi_kwm2,precip_mmh\n"


def _rows(n, start_hour=0):
    return "".join(f"2020-01-01T{(start_hour + h) % 24:02d}:00Z,{5 + h * 0.1},{0.0},{0.0}\n" for h in range(n))


def test_well_formed_file(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text(HEADER + _rows(24))
    ds = ingest(p)
    assert len(ds) == 24 and ds.n_dropped == 0 and ds.gaps == ()
    assert ds.records[3].wind_ms == pytest.approx(5.3)
    assert str(ds.records[0].timestamp.tzinfo) == "UTC"


def test_empty_and_bad_header():
    with pytest.raises(DataQualityError):
        ingest_text(HEADER)
    with pytest.raises(DataFormatError):
        ingest_text("time,wind\n1,2\n")
    with pytest.raises(DataFormatError):
        ingest_text("")


def test_duplicate_timestamp_names_line():
    text = HEADER + _rows(3) + "2020-01-01T02:00Z,5,0,0\n"
    with pytest.raises(ValidationError, match=":5:"):
        ingest_text(text)


def test_out_of_order_negative_and_off_hour():
    with pytest.raises(ValidationError, match="out of order"):
        ingest_text(HEADER + "2020-01-01T02:00Z,5,0,0\n2020-01-01T01:00Z,5,0,0\n")
    with pytest.raises(ValidationError, match="negative"):
        ingest_text(HEADER + "2020-01-01T02:00Z,-5,0,0\n")
    with pytest.raises(ValidationError, match="not on the hour"):
        ingest_text(HEADER + "2020-01-01T02:30Z,5,0,0\n")


def test_dropped_rows_counted_and_quality_limit():
    rows = _rows(20).splitlines(keepends=True)
    rows[5] = "2020-01-01T05:00Z,,0,0\n"
    ds = ingest_text(HEADER + "".join(rows))
    assert len(ds) == 19 and ds.n_dropped == 1
    assert ds.gaps[0][1] == 1
    rows[6] = "2020-01-01T06:00Z,nan,0,0\n"
    rows[7] = "2020-01-01T07:00Z,abc,0,0\n"
    with pytest.raises(DataQualityError):
        ingest_text(HEADER + "".join(rows))


def test_timezone_offsets_are_converted():
    ds = ingest_text(HEADER + "2020-01-01T08:00+08:00,5,0,0\n")
    assert str(ds.timestamps[0]) == "2020-01-01T00:00:00"


def test_window_and_csv_round_trip():
    ds = synthetic_dataset(72, 0)
    w = ds.window("2015-01-02T00:00", "2015-01-03T00:00")
    assert len(w) == 24
    back = ingest_text(ds.to_csv())
    np.testing.assert_array_equal(back.wind_ms, ds.wind_ms)
    np.testing.assert_array_equal(back.timestamps, ds.timestamps)


def test_hourly_moments():
    ds = synthetic_dataset(24 * 30, 1)
    hm = hourly_moments(ds)
    assert len(hm) == 24
    assert np.all(hm.ghi_mean[:6] == 0)
    assert hm.wind_mean[5] == pytest.approx(ds.wind_ms[5::24].mean())
    with pytest.raises(ValidationError):
        hourly_moments(ds.window(None, "2015-01-01T12:00"))
