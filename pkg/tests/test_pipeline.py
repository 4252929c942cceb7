import csv
import io

import pytest

from viscoevans import pipeline as pl
from viscoevans.errors import ContractViolation
from viscoevans.model import ModelVariant


def test_parse_range_includes_stop():
    assert pl.parse_range("0.2:0.2:1") == [0.2, 0.4, 0.6, 0.8, 1.0]
    assert pl.parse_range("1:0.1:1.3") == [1.0, 1.1, 1.2, 1.3]
    assert pl.parse_range("0:0.1:0.3000000000005") == [0.0, 0.1, 0.2, 0.3000000000005]
    assert pl.parse_range("0:1:2.5") == [0.0, 1.0, 2.0]
    assert pl.parse_range("2:1:1") == []
    assert pl.parse_range("0.75") == [0.75]
    for bad in ("1:2", "0:0:1", "0:-1:1"):
        with pytest.raises(ContractViolation):
            pl.parse_range(bad)


def test_config_text_parsing():
    cfg = pl.parse_config_text("# comment\nmodel = shear2d\nS=1.8  # inline\n\nalpha-1 = 2\ns = 2.0\n")
    assert cfg == {"model": "shear2d", "s": "2.0", "alpha_1": "2"}
    with pytest.raises(ContractViolation):
        pl.parse_config_text("model shear2d")


def test_build_run_config_validation():
    cfg = pl.build_run_config({"model": "shear2d", "alpha1": "1", "s": "1.8"})
    assert cfg.alpha == (1.0, 0.0) and cfg.target is pl.Target.ALL_LAX
    assert pl.build_run_config({"model": "transverse", "alpha": "0.1,0.9", "s": "0.7"}).strain_variant \
        is ModelVariant.COMPRESSIBLE2D
    c = pl.build_run_config({"model": "shear2d", "connect": "1,0:0.8,0", "s": "1.8547"})
    assert c.target is pl.Target.CONNECT and c.alpha == (1.0, 0.0)
    for bad in ({"model": "shear2d", "alpha": "1,0"},
                {"model": "shear2d", "alpha": "1,0,2", "s": "1"},
                {"model": "shear2d", "alpha": "1,0", "s": "1", "bogus": "1"},
                {"model": "shear2d", "alpha": "1,0", "s": "1", "viscosity": "Z1"},
                {"model": "shear2d", "alpha": "1,0", "s": "1", "target": "connect"},
                {"model": "comp2d", "alpha2": "0.1", "s": "1"}):
        with pytest.raises(ContractViolation):
            pl.build_run_config(bad)


def test_target_names():
    assert pl.Target.from_name("AllLaxPairs") is pl.Target.ALL_LAX
    assert pl.Target.from_name("overcompressive-family") is pl.Target.OVERCOMPRESSIVE
    assert pl.Target.from_name("FourPointConfigurations") is pl.Target.FOUR_POINT
    with pytest.raises(ContractViolation):
        pl.Target.from_name("some")


def _record(**kw):
    base = dict(model="Shear2D", alpha1=1.0, alpha2=-0.0, alpha3=1.0, s=1.8547, ap1=0.8, ap2=0.0, ap3=1.0,
                shock_class="Lax", R=2.0, n_points=20, max_rel_step=0.17, L=18.85, winding=0,
                verdict="Stable", seconds=1.25)
    base.update(kw)
    return pl.RunRecord(**base)


def test_record_csv_round_trip():
    recs = [_record(), _record(R=None, n_points=None, max_rel_step=None, L=None, winding=None,
                               verdict="Inconclusive(refinement depth exhausted)", alpha1=1 / 3)]
    buf = io.StringIO()
    pl.records_to_csv(recs, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == ",".join(pl.CSV_HEADER)
    assert "\r" not in text and "-0," not in text
    back = pl.read_csv_records(text)
    assert back[0] == _record(alpha2=0.0)
    assert back[1].alpha1 == 1 / 3 and back[1].R is None and back[1].inconclusive
    with pytest.raises(ContractViolation):
        pl.read_csv_records("a,b\n1,2\n")


def test_empty_grid_writes_header_only(tmp_path):
    spec = pl.build_sweep_spec({"model": "comp1d", "alpha3": "0.9:0.1:0.8", "s": "1.0"})
    out = tmp_path / "empty.csv"
    summary = pl.run_sweep(spec, out)
    assert out.read_text() == ",".join(pl.CSV_HEADER) + "\n"
    assert summary.rows == 0 and summary.exit_code == 0


SWEEP = {"model": "comp1d", "alpha3": "0.7:0.1:0.8", "s": "0.9:0.1:1.0"}


def _rows(path):
    with open(path, newline="") as fh:
        return [{k: v for k, v in r.items() if k != "seconds"} for r in csv.DictReader(fh)]


@pytest.fixture(scope="module")
def serial_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep") / "serial.csv"
    summary = pl.run_sweep(pl.build_sweep_spec(SWEEP), out)
    return out, summary


def test_sweep_enumerates_grid(serial_sweep):
    out, summary = serial_sweep
    assert summary.cases_total == 4 and summary.cases_run == 4
    rows = _rows(out)
    assert len(rows) == summary.rows > 0
    assert {r["model"] for r in rows} == {"Compressible1D"}
    assert all(r["verdict"] for r in rows)


def test_sweep_resume_does_no_work(serial_sweep, tmp_path):
    out, _ = serial_sweep
    copy = tmp_path / "serial.csv"
    copy.write_bytes(out.read_bytes())
    (tmp_path / "serial.csv.manifest").write_bytes(out.with_name("serial.csv.manifest").read_bytes())
    again = pl.run_sweep(pl.build_sweep_spec(SWEEP), copy)
    assert again.cases_run == 0 and again.evaluations == 0 and again.cases_skipped == 4
    assert copy.read_bytes() == out.read_bytes()


def test_sweep_resume_after_interruption(serial_sweep, tmp_path):
    out, _ = serial_sweep
    spec = pl.build_sweep_spec(SWEEP)
    first = spec.cases()[0]
    n_first = sum(1 for _ in pl.run_single(first)[0])
    part = tmp_path / "part.csv"
    lines = out.read_text().splitlines(keepends=True)
    part.write_text("".join(lines[: 1 + n_first]))
    (tmp_path / "part.csv.manifest").write_text(f"{first.key()}\t{n_first}\n")
    summary = pl.run_sweep(spec, part)
    assert summary.cases_run == 3 and summary.cases_skipped == 1
    assert _rows(part) == _rows(out)


def test_sweep_is_job_count_independent(serial_sweep, tmp_path):
    out, _ = serial_sweep
    par = tmp_path / "par.csv"
    pl.run_sweep(pl.build_sweep_spec(SWEEP), par, jobs=2)
    assert _rows(par) == _rows(out)


def test_alpha_filter_reasons():
    assert pl.alpha_filter(ModelVariant.COMPRESSIBLE1D, (0.5,)).startswith("endstate not strictly hyperbolic")
    assert pl.alpha_filter(ModelVariant.COMPRESSIBLE1D, (-0.5,)).startswith("infeasible")
    assert pl.alpha_filter(ModelVariant.SHEAR2D, (1.0, 0.0)) is None
