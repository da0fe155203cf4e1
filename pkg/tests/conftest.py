import json
import threading
import urllib.error
import urllib.request

import numpy as np
import pytest

from motionloom.core import MotionClip, Skeleton
from motionloom.diffusion import NoiseSchedule, TrainConfig, train, two_class_dataset, walker_dataset


def make_clip(frames, joints=1, fps=20.0, label="", boundaries=(), skeleton=None):
    """Build a clip from an (n, joints, 3) array or nested lists."""
    arr = np.asarray(frames, dtype=float)
    if arr.ndim == 1:  # scalar per frame: single joint moving on x
        arr = np.stack([arr, np.zeros_like(arr), np.zeros_like(arr)], axis=1)[:, None, :]
    sk = skeleton or Skeleton.stick(joints)
    return MotionClip(skeleton=sk, fps=fps, frames=arr, label=label, boundaries=boundaries)


def random_clip(rng, joints=3, n_frames=10, fps=20.0, label="rnd"):
    sk = Skeleton.stick(joints)
    frames = rng.normal(0.0, 1.0, size=(n_frames, joints, 3))
    return MotionClip(skeleton=sk, fps=fps, frames=frames, label=label)


@pytest.fixture(scope="session")
def schedule():
    return NoiseSchedule.linear()


@pytest.fixture(scope="session")
def two_class_denoiser(schedule):
    dataset = two_class_dataset(n=200, frames=40, seed=7)
    config = TrainConfig(steps=1200, batch_size=64, lr=3e-3, seed=0)
    return train(dataset, schedule, config)


@pytest.fixture(scope="session")
def walker_denoiser(schedule):
    config = TrainConfig(steps=800, batch_size=48, seed=1234)
    return train(walker_dataset(seed=1234), schedule, config)


class HttpClient:
    """Minimal JSON-over-HTTP test client (stdlib only)."""

    def __init__(self, base_url):
        self.base_url = base_url.rstrip("/")

    def request(self, method, path, body=None, raw=None):
        url = self.base_url + path
        data = None
        headers = {}
        if raw is not None:
            data = raw.encode("utf-8")
            headers["Content-Type"] = "application/x-ndjson"
        elif body is not None:
            data = json.dumps(body).encode("utf-8")
            headers["Content-Type"] = "application/json"
        req = urllib.request.Request(url, data=data, headers=headers, method=method)
        try:
            with urllib.request.urlopen(req, timeout=30) as resp:
                return resp.status, resp.read().decode("utf-8"), dict(resp.headers)
        except urllib.error.HTTPError as exc:
            return exc.code, exc.read().decode("utf-8"), dict(exc.headers)

    def get(self, path):
        status, text, _ = self.request("GET", path)
        return status, _maybe_json(text)

    def post(self, path, body=None, raw=None):
        status, text, _ = self.request("POST", path, body=body, raw=raw)
        return status, _maybe_json(text)

    def patch(self, path, body=None):
        status, text, _ = self.request("PATCH", path, body=body)
        return status, _maybe_json(text)

    def delete(self, path):
        status, text, _ = self.request("DELETE", path)
        return status, _maybe_json(text)


def _maybe_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


@pytest.fixture
def service_factory(tmp_path, walker_denoiser):
    """Yields a factory building an in-process Service on a temp store."""
    from motionloom.service import Service

    created = []

    def build(frames_per_step=90, **kwargs):
        svc = Service(
            tmp_path / f"data{len(created)}",
            denoiser=walker_denoiser,
            frames_per_step=frames_per_step,
            **kwargs,
        )
        created.append(svc)
        return svc

    yield build
    for svc in created:
        svc.close()


@pytest.fixture
def http_server(tmp_path, walker_denoiser):
    """A live HTTP server on an ephemeral port, torn down after the test."""
    from motionloom.service import Service, create_server

    service = Service(tmp_path / "httpdata", denoiser=walker_denoiser)
    server, _ = create_server(tmp_path / "httpdata", service=service)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    yield HttpClient(f"http://{host}:{port}"), service
    server.shutdown()
    server.server_close()
    service.close()
    thread.join(timeout=10)
