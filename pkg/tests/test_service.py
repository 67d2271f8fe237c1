import math

import pytest
from fastapi.testclient import TestClient

from gmp_overbound import __version__
from gmp_overbound.models import SamplingSpec, TauInterval, continuous_bound, nonstationary_k0
from gmp_overbound.service.app import app

client = TestClient(app)


class TestMeta:
    def test_health(self):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_version(self):
        response = client.get("/version")
        assert response.status_code == 200
        assert response.json()["version"] == __version__


class TestBoundEndpoints:
    def test_continuous(self):
        response = client.post(
            "/bound/continuous", json={"tau_min": 10, "tau_max": 100, "sigma2": 1}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["tau_hat"] == pytest.approx(31.6227766, rel=1e-9)
        assert body["k"] == pytest.approx(3.16227766, rel=1e-9)
        assert body["sigma_hat2"] == pytest.approx(3.16227766, rel=1e-9)

    def test_interval_order_rejected(self):
        response = client.post("/bound/continuous", json={"tau_min": 100, "tau_max": 10})
        assert response.status_code == 422
        assert "tau_max" in response.text

    def test_discrete(self):
        response = client.post(
            "/bound/discrete", json={"tau_min": 1, "tau_max": 10, "dt": 2}
        )
        assert response.status_code == 200
        assert response.json()["k"] == pytest.approx(2.7643, abs=1e-3)

    def test_k0(self):
        response = client.post("/bound/k0", json={"tau_min": 10, "tau_max": 100, "dt": 0.1})
        assert response.status_code == 200
        interval = TauInterval(10.0, 100.0)
        expected = nonstationary_k0(interval, SamplingSpec(0.1), continuous_bound(interval, 1.0))
        assert response.json()["k0"] == pytest.approx(expected, rel=1e-12)


class TestPsdEndpoint:
    def test_continuous_values(self):
        response = client.post(
            "/psd", json={"mode": "cont", "tau": 100, "sigma2": 1, "omega": [0.0, 0.01]}
        )
        assert response.status_code == 200
        assert response.json()["psd"][0] == pytest.approx(200.0, rel=1e-12)

    def test_discrete_needs_dt(self):
        response = client.post("/psd", json={"mode": "disc", "tau": 10, "omega": [0.0]})
        assert response.status_code == 400
        assert "dt" in response.json()["detail"]

    def test_beyond_nyquist_rejected(self):
        response = client.post(
            "/psd", json={"mode": "disc", "tau": 10, "dt": 2, "omega": [10.0]}
        )
        assert response.status_code == 400
        assert "Nyquist" in response.json()["detail"]


class TestVerifyEndpoints:
    def test_dominance_pass(self):
        response = client.post(
            "/verify/dominance",
            json={"mode": "cont", "tau_min": 10, "tau_max": 100, "freq_count": 500},
        )
        assert response.status_code == 200
        assert response.json()["passed"] is True

    def test_dominance_naive_fails(self):
        response = client.post(
            "/verify/dominance",
            json={
                "mode": "cont", "tau_min": 10, "tau_max": 100,
                "k": 1, "tau_hat": 100, "freq_count": 500,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["passed"] is False
        assert body["max_violation"] > 0

    def test_acm_scan(self):
        response = client.post(
            "/verify/acm",
            json={"tau_min": 10, "tau_max": 100, "dt": 0.1, "n_max": 100, "tau_count": 10},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["passed"] is True
        assert body["k0_used"] == pytest.approx(1.5160422268, abs=1e-6)


class TestDemoEndpoint:
    def test_kf_demo_series(self):
        response = client.post(
            "/demo/kf", json={"tau_min": 10, "tau_max": 100, "steps": 50}
        )
        assert response.status_code == 200
        body = response.json()
        names = [s["model"] for s in body["series"]]
        assert names == [
            "stationary-continuous", "stationary-discrete", "non-stationary", "oracle"
        ]
        for series in body["series"]:
            assert len(series["predicted_sigma_pos"]) == 51
            if series["model"] != "oracle":
                for predicted, true in zip(
                    series["predicted_sigma_pos"], series["true_sigma_pos"]
                ):
                    assert predicted >= true - 1e-9 * abs(predicted)


class TestSimulateEndpoint:
    def test_deterministic(self):
        payload = {"tau": 10, "sigma2": 1, "dt": 1, "steps": 5, "seed": 3, "count": 4}
        a = client.post("/simulate/gmp", json=payload)
        b = client.post("/simulate/gmp", json=payload)
        assert a.status_code == 200
        assert a.json()["realizations"] == b.json()["realizations"]
        assert len(a.json()["realizations"]) == 4
        assert len(a.json()["realizations"][0]) == 6

    def test_payload_cap(self):
        response = client.post(
            "/simulate/gmp",
            json={"tau": 10, "dt": 1, "steps": 10000, "seed": 1, "count": 10000},
        )
        assert response.status_code == 422


class TestMcEndpoint:
    def test_small_validation_run(self):
        response = client.post(
            "/validate/mc",
            json={
                "tau_min": 10, "tau_max": 100, "horizon": 30, "count": 10000,
                "check_steps": [10, 30], "lags": [0, 1], "seed": 4,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["passed"] is True
        checks = {row["check"] for row in body["rows"]}
        assert checks == {"autocov", "kf_pos_var"}
