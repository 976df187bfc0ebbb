import copy

import pytest

from src.processor import ReportProcessor
from src.validation import (
    batch_validate,
    get_validation_summary,
    validate_elliptic_report,
    validate_envelope,
    validate_resonance_report,
)


@pytest.fixture(scope="module")
def processor():
    return ReportProcessor(threads=2)


@pytest.fixture(scope="module")
def resonance_payload(processor):
    return processor.run_resonances(20)


@pytest.fixture(scope="module")
def elliptic_payload(processor):
    return processor.run_elliptic(15, 10**4)


def test_resonance_report_valid(resonance_payload):
    result = validate_resonance_report(resonance_payload)
    assert result["is_valid"]
    assert result["score"] == 1.0
    assert result["triples"] == 2


def test_resonance_report_tampered(resonance_payload):
    tampered = copy.deepcopy(resonance_payload)
    tampered["triples"][1]["n3"] = 17
    result = validate_resonance_report(tampered)
    assert not result["is_valid"]
    assert any("(10, 10, 17)" in issue for issue in result["issues"])


@pytest.mark.parametrize("key, index, value, message", [
    ("squarefree", 0, 140, "does not split F(5) as s * m**2"),
    ("m", 2, 2, "does not split F(8) as s * m**2"),
    ("F", 2, 561, "records F(8) = 561"),
])
def test_resonance_certificate_tampered(resonance_payload, key, index, value, message):
    tampered = copy.deepcopy(resonance_payload)
    tampered["certificates"][0][key][index] = value
    if key == "squarefree":
        tampered["certificates"][0]["m"][index] = 1
    result = validate_resonance_report(tampered)
    assert not result["is_valid"]
    assert result["issues"] == [f"Certificate for (5, 5, 8) {message}"]


def test_resonance_certificate_malformed(resonance_payload):
    tampered = copy.deepcopy(resonance_payload)
    del tampered["certificates"][1]["m"]
    result = validate_resonance_report(tampered)
    assert len(result["issues"]) == 1
    assert result["issues"][0].startswith("Malformed certificate")


def test_empty_report():
    result = validate_resonance_report({})
    assert not result["is_valid"]
    assert result["issues"] == ["Empty report"]


def test_elliptic_report_valid(elliptic_payload):
    assert elliptic_payload["validation"]["is_valid"]
    assert 15 in elliptic_payload["validation"]["published_curves"]


def test_elliptic_point_off_curve(elliptic_payload):
    tampered = copy.deepcopy(elliptic_payload)
    c15 = next(curve for curve in tampered["curves"] if curve["c"] == 15)
    c15["points"].append([91, 900])
    result = validate_elliptic_report(tampered)
    assert not result["is_valid"]
    assert "Point (91, 900) is not on E_15" in result["issues"]


def test_dispatch_and_summary(resonance_payload):
    envelopes = [
        {"command": "resonances", "payload": resonance_payload},
        {"command": "resonances", "payload": {}},
        {"command": "sogge", "payload": {}},
    ]
    assert validate_envelope(envelopes[2]) is None
    results = batch_validate(envelopes)
    assert [r["command"] for r in results] == ["resonances", "resonances"]
    summary = get_validation_summary(results)
    assert (summary["total"], summary["valid"], summary["invalid"]) == (2, 1, 1)
    assert summary["common_issues"] == [("Empty report", 1)]


def test_summary_of_nothing():
    assert get_validation_summary([])["total"] == 0
