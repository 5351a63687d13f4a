from dialogsep.metrics import MetricReport
from dialogsep.mushra import StatRow
from dialogsep.plotting import render_metric_figure, render_mushra_figure

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_metric_figure_written(tmp_path):
    reports = [
        MetricReport(f"item{i}", 2.0, 14.0 + i, 12.0 + i, 5.0, 30.0, 25.0)
        for i in range(3)
    ]
    path = tmp_path / "metrics.png"
    render_metric_figure(reports, path)
    data = path.read_bytes()
    assert data[:8] == PNG_MAGIC
    assert len(data) > 1000


def test_metric_figure_single_item(tmp_path):
    path = tmp_path / "one.png"
    render_metric_figure([MetricReport("only", 0.0, 8.0, 8.0, 1.0, 20.0, 19.0)], path)
    assert path.read_bytes()[:8] == PNG_MAGIC


def test_mushra_figure_written(tmp_path):
    rows = []
    for item in ("a", "b", "average"):
        for cond, mean in (("hidden_reference", 98.0), ("anchor_lp3500", 30.0), ("m1", 70.0)):
            rows.append(StatRow(item, cond, mean, mean - 4.0, mean + 4.0, 8))
    path = tmp_path / "scores.png"
    render_mushra_figure(rows, path)
    assert path.read_bytes()[:8] == PNG_MAGIC


def test_mushra_figure_handles_missing_intervals(tmp_path):
    rows = [StatRow("a", "m1", 50.0, None, None, 1)]
    path = tmp_path / "scores.png"
    render_mushra_figure(rows, path)
    assert path.read_bytes()[:8] == PNG_MAGIC
