from cfree.figures import render_residual_figure
from cfree.reports import make_report


def test_render_with_mixed_outcomes(tmp_path):
    reports = [make_report("ok", 1.0, 1.0, 1e-9),
               make_report("bad", 1.0, 2.0, 1e-9),
               make_report("tiny", 0.0, 0.0, 1e-12)]
    path = tmp_path / "fig.png"
    render_residual_figure(path, "demo", reports)
    assert path.exists() and path.stat().st_size > 1000


def test_render_skips_empty(tmp_path):
    path = tmp_path / "none.png"
    render_residual_figure(path, "demo", [])
    assert not path.exists()
