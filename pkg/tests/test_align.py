import numpy as np
import pytest

from dramatopics.align import AlignError, ExternalSeries, align, load_series


def write(tmp_path, text, name="s.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_three_rows(tmp_path):
    p = write(tmp_path, "year,gdppc\n1800,1300\n1700,1000\n1750,1100\n")
    s = load_series(p)
    assert s.points == [(1700, 1000.0), (1750, 1100.0), (1800, 1300.0)]


def test_load_tab_and_country(tmp_path):
    p = write(tmp_path, "country\tyear\tgdppc\nFrance\t1700\t1000\nSpain\t1700\t900\nFrance\t1710\t\nFrance\t1720\t1050\n")
    s = load_series(p, country_col="country", country="France")
    assert s.points == [(1700, 1000.0), (1720, 1050.0)]


def test_load_errors(tmp_path):
    with pytest.raises(AlignError, match="duplicate"):
        load_series(write(tmp_path, "year,gdppc\n1700,1\n1700,2\n"))
    with pytest.raises(AlignError, match="'gdppc'"):
        load_series(write(tmp_path, "year,value\n1700,1\n"))
    with pytest.raises(AlignError, match="row 3"):
        load_series(write(tmp_path, "year,gdppc\n1700,1\n1701,abc\n"))


def test_maddison_style_extract(tmp_path):
    lines = ["countrycode,country,region,year,gdppc,pop"]
    years = [1700, 1720, 1750, 1760, 1789, 1800, 1810] + list(range(1820, 1901))
    for y in years:
        lines.append(f"FRA,France,Western Europe,{y},{1000 + (y - 1700) * 10},{20000}")
    lines.append("FRA,France,Western Europe,1901,,20000")
    lines.append("ESP,Spain,Western Europe,1800,900,10000")
    p = write(tmp_path, "\n".join(lines) + "\n")
    s = load_series(p, country_col="country", country="France")
    expected = sum(1 for line in p.read_text().splitlines()[1:] if ",France," in line and line.split(",")[4])
    assert len(s.points) == expected
    assert s.points[0][0] == 1700 and s.points[-1][0] == 1900


def test_single_year_degenerate():
    ext = ExternalSeries("g", "", [(1750, 5.0)])
    ov = align([(1750, 0.3)], ext)
    assert ov.years == [1750]
    assert ov.topic_values.tolist() == [0.0] and ov.external_values.tolist() == [0.0]


def test_interpolation():
    ext = ExternalSeries("g", "", [(y, float(y - 1700)) for y in range(1700, 1901, 10)])
    topic = [(y, 0.5) for y in range(1700, 1901)]
    ov = align(topic, ext, normalization="none", interpolate=True)
    assert ov.years == list(range(1700, 1901))
    np.testing.assert_allclose(ov.external_values, np.arange(201, dtype=float), atol=1e-12)
    assert [y for y, f in zip(ov.years, ov.interpolated) if not f] == list(range(1700, 1901, 10))


def test_intersection_join_default():
    ext = ExternalSeries("g", "", [(1700, 1.0), (1710, 2.0), (1720, 3.0)])
    ov = align([(1700, 0.1), (1705, 0.2), (1720, 0.3), (1730, 0.4)], ext, normalization="none")
    assert ov.years == [1700, 1720]
    assert not any(ov.interpolated)


def test_minmax_exact_bounds():
    ext = ExternalSeries("g", "", [(y, 1000 * 1.013 ** (y - 1700)) for y in range(1700, 1901)])
    topic = [(y, 0.05 + 0.0011 * (y - 1700)) for y in range(1700, 1901)]
    ov = align(topic, ext)
    for arr in (ov.topic_values, ov.external_values):
        assert arr.min() == 0.0 and arr.max() == 1.0
        assert ((arr >= 0) & (arr <= 1)).all()


def test_zscore_and_errors():
    ext = ExternalSeries("g", "", [(1700, 1.0), (1701, 3.0)])
    ov = align([(1700, 0.2), (1701, 0.4)], ext, normalization="z-score")
    np.testing.assert_allclose(ov.external_values, [-1, 1])
    with pytest.raises(AlignError):
        align([(1800, 0.1)], ext)
    with pytest.raises(AlignError):
        align([(1700, 0.1)], ext, normalization="log")


def test_series_invariants():
    with pytest.raises(AlignError):
        ExternalSeries("g", "", [(1701, 1.0), (1700, 2.0)])
    with pytest.raises(AlignError):
        ExternalSeries("g", "", [(1700, float("nan"))])
