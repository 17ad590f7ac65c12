import math

import requests
from influxdb_client.rest import ApiException

from pconcave_app.config import AppConfig
from pconcave_app.metrics import CHECK_MEASUREMENT, create_influx_client, publish_report, write_metric
from pconcave_app.report import ComparisonReport


def _report() -> ComparisonReport:
    report = ComparisonReport(experiment="theorem41", config_echo={})
    report.add_check("pointwise_min", 1.0, 0.5, tolerance=0.0)
    report.add_check("hopf_u0", 1.0, 1.0, tolerance=0.0)
    report.add_check("lq_norm[r=2]", math.nan, 1.0, tolerance=0.0)
    return report


def test_create_influx_client():
    cfg = AppConfig()
    cfg.influx_url = "http://example.com"
    client = create_influx_client(cfg)
    assert client.api_client.configuration.host == "http://example.com"


def test_write_metric_calls_write(dummy_client):
    cfg = AppConfig()
    cfg.influx_token = "token"
    write_metric(dummy_client, cfg, "m", {"t": "v"}, {"f": 1.0})
    assert len(dummy_client.api.calls) == 1
    bucket, org, record = dummy_client.api.calls[0]
    assert bucket == cfg.influx_bucket
    assert org == cfg.influx_org
    assert record is not None


def test_write_metric_skips_without_token(dummy_client):
    write_metric(dummy_client, AppConfig(), "m", {}, {"f": 1.0})
    assert dummy_client.api.calls == []


def test_write_metric_swallows_client_errors(make_client):
    cfg = AppConfig(influx_token="token")
    for error in (ApiException(status=401), requests.exceptions.ConnectionError("down"), RuntimeError("boom")):
        write_metric(make_client(error), cfg, "m", {}, {"f": 1.0})


def test_publish_report_writes_one_point_per_finite_record(dummy_client):
    cfg = AppConfig(enable_influx=True, influx_token="token")
    assert publish_report(dummy_client, cfg, _report()) == 2
    records = [call[2] for call in dummy_client.api.calls]
    assert len(records) == 2
    line = records[0].to_line_protocol()
    assert line.startswith(CHECK_MEASUREMENT)
    assert "check=pointwise_min" in line
    assert "slack=0.5" in line


def test_publish_report_disabled(dummy_client):
    assert publish_report(dummy_client, AppConfig(influx_token="token"), _report()) == 0
    assert publish_report(None, AppConfig(enable_influx=True, influx_token="token"), _report()) == 0
    assert dummy_client.api.calls == []
