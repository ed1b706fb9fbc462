import json

import pytest
from fastapi.testclient import TestClient

from choquetkit.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}


class TestIntegrate:
    def test_power_half(self, client):
        response = client.post(
            "/integrate",
            json={"expression": "t", "distortion": "power:0.5", "interval": [0, 1]},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["value"] == pytest.approx(2 / 3, abs=1e-3)
        assert abs(body["value"] - body["oracle"]) < 1e-4

    def test_constant_moebius(self, client):
        response = client.post("/integrate", json={"expression": "3", "distortion": "moebius"})
        assert response.json()["value"] == 3.0

    def test_eval_error_is_422_with_offset(self, client):
        response = client.post("/integrate", json={"expression": "log(t)"})
        assert response.status_code == 422
        body = response.json()
        assert body["error_type"] == "EvalError"
        assert "offset" in body

    def test_parse_error_offset(self, client):
        response = client.post("/integrate", json={"expression": "2*^t"})
        assert response.status_code == 422
        assert response.json()["offset"] == 2

    def test_validation_error(self, client):
        response = client.post("/integrate", json={"expression": "t", "grid_size": 0})
        assert response.status_code == 422


class TestOperator:
    def test_bernstein_identity_grid(self, client):
        response = client.post(
            "/operator",
            json={
                "family": "bernstein",
                "expression": "t",
                "distortion": "identity",
                "degree": 10,
                "grid_size": 11,
            },
        )
        assert response.status_code == 200
        points = response.json()["points"]
        assert len(points) == 11
        for p in points:
            expected = (20 * p["x"] + 1) / 22
            assert p["value"] == pytest.approx(expected, abs=1e-6)

    def test_unknown_family_rejected(self, client):
        response = client.post("/operator", json={"family": "fourier", "expression": "t"})
        assert response.status_code == 422

    def test_szasz_window_error_names_b(self, client):
        response = client.post(
            "/operator",
            json={
                "family": "szasz",
                "expression": "t",
                "degree": 8,
                "window": [0, 0.5],
                "eval_range": [0, 0.5],
                "grid_size": 3,
            },
        )
        assert response.status_code == 422
        body = response.json()
        assert body["error_type"] == "WindowError"
        assert body["required_b"] > 0.5

    def test_szasz_reports_truncation(self, client):
        response = client.post(
            "/operator",
            json={
                "family": "szasz",
                "expression": "t",
                "degree": 8,
                "eval_range": [0, 0.3],
                "grid_size": 3,
            },
        )
        assert response.status_code == 200
        trunc = response.json()["truncation"]
        assert trunc["tail_bound"] < 1e-12


class TestKorovkin:
    def test_moebius_run(self, client):
        response = client.post(
            "/korovkin",
            json={
                "expression": "abs(t-0.5)",
                "distortion": "moebius",
                "ns": [1, 4],
                "grid_size": 5,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["c_source"] == "estimated"
        assert body["c_used"] == pytest.approx(4.0, abs=0.05)
        assert body["all_hold"]
        assert body["convergence"]["decreasing"]
        assert len(body["rows"]) == 10

    def test_negative_function_rejected(self, client):
        response = client.post("/korovkin", json={"expression": "t-2", "ns": [1], "grid_size": 3})
        assert response.status_code == 422
        assert "nonnegative" in response.json()["detail"]

    def test_unbounded_distortion_needs_explicit_c(self, client):
        response = client.post(
            "/korovkin",
            json={"expression": "t", "distortion": "power:0.5", "ns": [1], "grid_size": 3},
        )
        assert response.status_code == 422

    def test_explicit_c_recorded(self, client):
        response = client.post(
            "/korovkin",
            json={"expression": "t", "distortion": "moebius", "c": 2.0, "ns": [1], "grid_size": 3},
        )
        assert response.status_code == 200
        assert response.json()["c_source"] == "given"
        assert response.json()["summary"]["c"] == 2.0


class TestProperties:
    def test_moebius_clean(self, client):
        response = client.post(
            "/properties", json={"distortion": "moebius", "seed": 42, "trials": 10}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["failures"] == 0
        assert body["all_passed"]
        suites = {s["suite"] for s in body["suites"]}
        assert suites == {"choquet-integral", "inequalities"}

    def test_non_submodular_gated(self, client, tmp_path):
        table = tmp_path / "convex.csv"
        table.write_text("0,0\n0.5,0.05\n1,1\n")
        response = client.post(
            "/properties",
            json={"distortion": f"table:{table}", "seed": 1, "trials": 5},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["failures"] == 0
        integral = next(s for s in body["suites"] if s["suite"] == "choquet-integral")
        by_name = {c["name"]: c for c in integral["checks"]}
        assert by_name["subadditivity"]["status"] == "skipped"

    def test_deterministic_payload(self, client):
        a = client.post("/properties", json={"distortion": "moebius", "seed": 9, "trials": 8})
        b = client.post("/properties", json={"distortion": "moebius", "seed": 9, "trials": 8})
        assert a.content == b.content


class TestCapacity:
    def test_moebius(self, client):
        response = client.post("/capacity", json={"distortion": "moebius", "table_points": 5})
        assert response.status_code == 200
        body = response.json()
        assert body["submodular"]
        assert body["c"] == pytest.approx(4.0, abs=0.05)
        for p in body["points"]:
            assert p["nu_dual"] == pytest.approx(p["x"] / (2 - p["x"]), abs=1e-12)

    def test_identity_self_dual(self, client):
        response = client.post("/capacity", json={"distortion": "identity"})
        body = response.json()
        assert body["c"] == 1.0
        for p in body["points"]:
            assert p["nu"] == pytest.approx(p["nu_dual"], abs=1e-12)

    def test_power_half_unbounded(self, client):
        response = client.post("/capacity", json={"distortion": "power:0.5"})
        body = response.json()
        assert body["unbounded"]
        assert body["c"] is None

    def test_bad_spec(self, client):
        response = client.post("/capacity", json={"distortion": "frobnicate"})
        assert response.status_code == 422
