"""File-backed HTTP service exposing the authoring pipeline.

Single embedded store (a data directory), one background generation worker,
JSON request/response bodies in the same structured-text formats as the
files. Project mutations are serialized per project; jobs run FIFO, so
concurrent jobs can never interleave project state.
"""

from __future__ import annotations

import json
import mimetypes
import queue
import re
import threading
from dataclasses import dataclass, field
from enum import Enum
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .core import MotionFormatError, ValidationError, canonical_dumps, save_motion
from .diffusion import Denoiser, NoiseSchedule, TrainConfig, train, walker_dataset
from .metrics import save_report
from .pipeline import execute_plan
from .session import (
    DEFAULT_FRAMES_PER_STEP,
    MockInstructionClient,
    Project,
    RenderScale,
    ScanLog,
    UncontextualizedError,
    UnknownIdError,
)
from .smoothing import DEFAULT_BLEND_LEN

DEFAULT_PORT = 8765
SERVICE_TRAIN_SEED = 1234


class ApiError(Exception):
    def __init__(self, status: int, payload: dict):
        self.status = status
        self.payload = payload
        super().__init__(payload.get("error", f"HTTP {status}"))


def _not_found(what: str) -> ApiError:
    return ApiError(404, {"error": what})


def _invalid(message: str, path: str = "") -> ApiError:
    return ApiError(422, {"error": message, "errors": [{"path": path, "message": message}]})


class JobState(str, Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


@dataclass
class Job:
    id: str
    project_id: str
    seed: int
    blend_len: int
    guidance_scale: float | None
    plan_dict: dict
    state: JobState = JobState.QUEUED
    result_motion_ref: str | None = None
    error_detail: str | None = None
    report_dict: dict | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "project_id": self.project_id,
            "seed": self.seed,
            "blend_len": self.blend_len,
            "guidance_scale": self.guidance_scale,
            "state": self.state.value,
            "result_motion_ref": self.result_motion_ref,
            "error_detail": self.error_detail,
            "plan": self.plan_dict,
            "report": self.report_dict,
        }


class ProjectStore:
    """Projects, motions, and reports as canonical JSON files under data_dir."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        for sub in ("projects", "motions", "reports"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()

    def _project_path(self, project_id: str) -> Path:
        return self.root / "projects" / f"{project_id}.json"

    def next_project_id(self) -> str:
        with self._lock:
            existing = {p.stem for p in (self.root / "projects").glob("*.json")}
            n = 1
            while f"p{n}" in existing:
                n += 1
            return f"p{n}"

    def save_project(self, project: Project) -> None:
        with self._lock:
            path = self._project_path(project.id)
            tmp = path.with_suffix(".json.tmp")
            tmp.write_text(project.dumps(), encoding="utf-8")
            tmp.replace(path)

    def load_project(self, project_id: str) -> Project:
        path = self._project_path(project_id)
        if not path.exists():
            raise UnknownIdError(f"unknown project id {project_id!r}")
        return Project.loads(path.read_text(encoding="utf-8"))

    def delete_project(self, project_id: str) -> None:
        path = self._project_path(project_id)
        if not path.exists():
            raise UnknownIdError(f"unknown project id {project_id!r}")
        path.unlink()

    def list_project_ids(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "projects").glob("*.json"))

    def motion_path(self, motion_id: str) -> Path:
        return self.root / "motions" / f"{motion_id}.json"

    def report_path(self, motion_id: str) -> Path:
        return self.root / "reports" / f"{motion_id}.json"


class Service:
    """Pipeline operations behind the HTTP surface (also usable in-process).

    A denoiser checkpoint is trained once (deterministically) and cached in
    the data directory, so repeated service runs generate identical motions
    for identical requests.
    """

    def __init__(
        self,
        data_dir: str | Path,
        denoiser: Denoiser | None = None,
        train_config: TrainConfig | None = None,
        frames_per_step: int = DEFAULT_FRAMES_PER_STEP,
        instruction_client=None,
    ):
        self.store = ProjectStore(data_dir)
        self.frames_per_step = frames_per_step
        self.client = instruction_client or MockInstructionClient()
        self.schedule = NoiseSchedule.linear()
        self.denoiser = denoiser or self._load_or_train(train_config)
        self._jobs: dict[str, Job] = {}
        self._jobs_lock = threading.RLock()
        self._project_locks: dict[str, threading.RLock] = {}
        self._queue: "queue.Queue[str | None]" = queue.Queue()
        self._worker = threading.Thread(target=self._work, daemon=True)
        self._worker.start()

    def _load_or_train(self, train_config: TrainConfig | None) -> Denoiser:
        checkpoint = self.store.root / "denoiser.json"
        if checkpoint.exists():
            return Denoiser.load(checkpoint)
        config = train_config or TrainConfig(steps=800, batch_size=48, seed=SERVICE_TRAIN_SEED)
        denoiser = train(walker_dataset(seed=SERVICE_TRAIN_SEED), self.schedule, config)
        denoiser.save(checkpoint)
        return denoiser

    def close(self) -> None:
        self._queue.put(None)
        self._worker.join(timeout=30)

    def _lock_for(self, project_id: str) -> threading.RLock:
        with self._jobs_lock:
            return self._project_locks.setdefault(project_id, threading.RLock())

    # -- project CRUD --------------------------------------------------------

    def create_project(self) -> dict:
        project = Project(project_id=self.store.next_project_id())
        self.store.save_project(project)
        return project.to_dict()

    def list_projects(self) -> dict:
        return {"projects": self.store.list_project_ids()}

    def get_project(self, project_id: str) -> dict:
        return self.store.load_project(project_id).to_dict()

    def delete_project(self, project_id: str) -> dict:
        self.store.delete_project(project_id)
        return {"deleted": project_id}

    def _mutate(self, project_id: str, fn: Callable[[Project], Any]) -> tuple[Project, Any]:
        with self._lock_for(project_id):
            project = self.store.load_project(project_id)
            result = fn(project)
            self.store.save_project(project)
            return project, result

    # -- script operations -----------------------------------------------------

    def set_task(self, project_id: str, text: str) -> dict:
        project, steps = self._mutate(project_id, lambda p: p.set_task(text, self.client))
        return {"task_text": project.task_text, "steps": [s.to_dict() for s in steps]}

    def insert_step(self, project_id: str, text: str, index: int | None = None) -> dict:
        _, step = self._mutate(project_id, lambda p: p.insert_step(text, index=index))
        return step.to_dict()

    def edit_step(
        self,
        project_id: str,
        step_id: str,
        text: str | None = None,
        scale: str | None = None,
    ) -> dict:
        scale_value = None if scale is None else RenderScale(scale)
        _, step = self._mutate(
            project_id, lambda p: p.edit_step(step_id, text=text, scale=scale_value)
        )
        return step.to_dict()

    def delete_step(self, project_id: str, step_id: str) -> dict:
        _, notices = self._mutate(project_id, lambda p: p.delete_step(step_id))
        return {"deleted": step_id, "notices": notices}

    def create_group(self, project_id: str, step_ids: list[str]) -> dict:
        _, group = self._mutate(project_id, lambda p: p.create_group(step_ids))
        return group.to_dict()

    def ingest_scan(self, project_id: str, group_id: str, scan_jsonl: str) -> dict:
        log = ScanLog.from_jsonl(scan_jsonl)
        project, warnings = self._mutate(project_id, lambda p: p.ingest_scan(group_id, log))
        return {"group": project.group(group_id).to_dict(), "warnings": warnings}

    def get_plan(self, project_id: str) -> dict:
        project = self.store.load_project(project_id)
        return project.compile_plan(frames_per_step=self.frames_per_step).to_dict()

    # -- generation jobs ---------------------------------------------------------

    def generate(
        self,
        project_id: str,
        seed: int = 0,
        blend_len: int = DEFAULT_BLEND_LEN,
        guidance_scale: float | None = None,
    ) -> dict:
        with self._lock_for(project_id):
            project = self.store.load_project(project_id)
            plan = project.compile_plan(frames_per_step=self.frames_per_step)
        if blend_len < 2 or 2 * blend_len > self.frames_per_step:
            raise ValidationError(
                f"blend_len must lie in [2, {self.frames_per_step // 2}], got {blend_len}"
            )
        if guidance_scale is not None and guidance_scale < 0:
            raise ValidationError("guidance_scale must be >= 0")
        with self._jobs_lock:
            job_id = f"j{len(self._jobs) + 1}"
            job = Job(
                id=job_id,
                project_id=project_id,
                seed=int(seed),
                blend_len=int(blend_len),
                guidance_scale=guidance_scale,
                plan_dict=plan.to_dict(),
            )
            self._jobs[job_id] = job
        self._queue.put(job_id)
        return job.to_dict()

    def get_job(self, job_id: str) -> dict:
        with self._jobs_lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise UnknownIdError(f"unknown job id {job_id!r}")
            return job.to_dict()

    def wait_for_job(self, job_id: str, timeout_s: float = 120.0) -> dict:
        """Poll helper for tests and the CLI."""
        import time

        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            state = self.get_job(job_id)
            if state["state"] in ("done", "failed"):
                return state
            time.sleep(0.02)
        raise TimeoutError(f"job {job_id} did not finish within {timeout_s}s")

    def _work(self) -> None:
        from .session import GenerationPlan

        while True:
            job_id = self._queue.get()
            if job_id is None:
                return
            with self._jobs_lock:
                job = self._jobs[job_id]
                job.state = JobState.RUNNING
            try:
                plan = GenerationPlan.from_dict(job.plan_dict)
                result = execute_plan(
                    plan,
                    self.denoiser,
                    self.schedule,
                    seed=job.seed,
                    blend_len=job.blend_len,
                    guidance_scale=job.guidance_scale,
                )
                motion_id = f"m{job.id[1:]}"
                save_motion(result.motion, self.store.motion_path(motion_id))
                save_report(result.report, self.store.report_path(motion_id))
                with self._jobs_lock:
                    job.result_motion_ref = motion_id
                    job.report_dict = result.report.to_dict()
                    job.state = JobState.DONE
            except Exception as exc:  # job isolation: a bad job must not kill the worker
                with self._jobs_lock:
                    job.error_detail = f"{type(exc).__name__}: {exc}"
                    job.state = JobState.FAILED

    # -- motion retrieval ----------------------------------------------------------

    def motion_text(self, motion_id: str) -> str:
        path = self.store.motion_path(motion_id)
        if not path.exists():
            raise UnknownIdError(f"unknown motion id {motion_id!r}")
        return path.read_text(encoding="utf-8")

    def metrics_text(self, motion_id: str) -> str:
        path = self.store.report_path(motion_id)
        if not path.exists():
            raise UnknownIdError(f"no metrics for motion id {motion_id!r}")
        return path.read_text(encoding="utf-8")

    def health(self) -> dict:
        return {"status": "ok", "version": __version__}


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------

def _body_str(body: dict, name: str, required: bool = True, default=None) -> Any:
    if name not in body or body[name] is None:
        if required:
            raise _invalid(f"missing field {name!r}", path=name)
        return default
    value = body[name]
    if not isinstance(value, str) or not value.strip():
        raise _invalid(f"field {name!r} must be a non-empty string", path=name)
    return value


def _body_int(body: dict, name: str, default: int) -> int:
    value = body.get(name, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise _invalid(f"field {name!r} must be an integer", path=name)
    return int(value)


ROUTES: list[tuple[str, re.Pattern, Callable[[Service, re.Match, dict, bytes], Any]]] = []


def route(method: str, pattern: str):
    compiled = re.compile(f"^{pattern}$")

    def register(fn):
        ROUTES.append((method, compiled, fn))
        return fn

    return register


@route("GET", r"/health")
def _r_health(svc, m, body, raw):
    return svc.health()


@route("POST", r"/projects")
def _r_create(svc, m, body, raw):
    return svc.create_project()


@route("GET", r"/projects")
def _r_list(svc, m, body, raw):
    return svc.list_projects()


@route("GET", r"/projects/(?P<pid>[\w-]+)")
def _r_get_project(svc, m, body, raw):
    return svc.get_project(m["pid"])


@route("DELETE", r"/projects/(?P<pid>[\w-]+)")
def _r_delete_project(svc, m, body, raw):
    return svc.delete_project(m["pid"])


@route("POST", r"/projects/(?P<pid>[\w-]+)/task")
def _r_task(svc, m, body, raw):
    return svc.set_task(m["pid"], _body_str(body, "text"))


@route("POST", r"/projects/(?P<pid>[\w-]+)/steps")
def _r_insert_step(svc, m, body, raw):
    index = body.get("index")
    if index is not None:
        index = _body_int(body, "index", 0)
    return svc.insert_step(m["pid"], _body_str(body, "text"), index=index)


@route("PATCH", r"/projects/(?P<pid>[\w-]+)/steps/(?P<sid>[\w-]+)")
def _r_edit_step(svc, m, body, raw):
    text = _body_str(body, "text", required=False)
    scale = _body_str(body, "scale", required=False)
    if scale is not None and scale not in ("full_body", "hands_only"):
        raise _invalid("scale must be full_body or hands_only", path="scale")
    if text is None and scale is None:
        raise _invalid("nothing to change; provide text and/or scale", path="")
    return svc.edit_step(m["pid"], m["sid"], text=text, scale=scale)


@route("DELETE", r"/projects/(?P<pid>[\w-]+)/steps/(?P<sid>[\w-]+)")
def _r_delete_step(svc, m, body, raw):
    return svc.delete_step(m["pid"], m["sid"])


@route("POST", r"/projects/(?P<pid>[\w-]+)/groups")
def _r_create_group(svc, m, body, raw):
    step_ids = body.get("step_ids")
    if not isinstance(step_ids, list) or not all(isinstance(s, str) for s in step_ids):
        raise _invalid("step_ids must be a list of step id strings", path="step_ids")
    return svc.create_group(m["pid"], step_ids)


@route("POST", r"/projects/(?P<pid>[\w-]+)/groups/(?P<gid>[\w-]+)/scan")
def _r_scan(svc, m, body, raw):
    return svc.ingest_scan(m["pid"], m["gid"], raw.decode("utf-8"))


@route("GET", r"/projects/(?P<pid>[\w-]+)/plan")
def _r_plan(svc, m, body, raw):
    return svc.get_plan(m["pid"])


@route("POST", r"/projects/(?P<pid>[\w-]+)/generate")
def _r_generate(svc, m, body, raw):
    guidance = body.get("guidance_scale")
    if guidance is not None:
        if isinstance(guidance, bool) or not isinstance(guidance, (int, float)):
            raise _invalid("guidance_scale must be a number", path="guidance_scale")
        guidance = float(guidance)
    return svc.generate(
        m["pid"],
        seed=_body_int(body, "seed", 0),
        blend_len=_body_int(body, "blend_len", DEFAULT_BLEND_LEN),
        guidance_scale=guidance,
    )


@route("GET", r"/jobs/(?P<jid>[\w-]+)")
def _r_job(svc, m, body, raw):
    return svc.get_job(m["jid"])


@route("GET", r"/motions/(?P<mid>[\w-]+)")
def _r_motion(svc, m, body, raw):
    return RawJson(svc.motion_text(m["mid"]))


@route("GET", r"/motions/(?P<mid>[\w-]+)/metrics")
def _r_metrics(svc, m, body, raw):
    return RawJson(svc.metrics_text(m["mid"]))


@dataclass
class RawJson:
    text: str


class ApiHandler(BaseHTTPRequestHandler):
    server_version = f"motionloom/{__version__}"
    protocol_version = "HTTP/1.1"

    @property
    def service(self) -> Service:
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # quiet by default
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    def _send(self, status: int, text: str, content_type: str = "application/json") -> None:
        data = text.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(data)

    def _dispatch(self, method: str) -> None:
        path = self.path.split("?", 1)[0].rstrip("/") or "/"
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        body: dict = {}
        if raw and method in ("POST", "PATCH") and not path.endswith("/scan"):
            try:
                parsed = json.loads(raw.decode("utf-8"))
                if not isinstance(parsed, dict):
                    raise ValueError("body must be a JSON object")
                body = parsed
            except (ValueError, UnicodeDecodeError) as exc:
                self._send(422, canonical_dumps({"error": f"bad request body: {exc}"}))
                return
        for route_method, pattern, fn in ROUTES:
            if route_method != method:
                continue
            match = pattern.match(path)
            if match is None:
                continue
            try:
                result = fn(self.service, match, body, raw)
            except ApiError as exc:
                self._send(exc.status, canonical_dumps(exc.payload))
                return
            except UncontextualizedError as exc:
                self._send(
                    409,
                    canonical_dumps(
                        {"error": str(exc), "draft_step_ids": list(exc.step_ids)}
                    ),
                )
                return
            except UnknownIdError as exc:
                self._send(404, canonical_dumps({"error": str(exc.args[0])}))
                return
            except (ValidationError, MotionFormatError) as exc:
                self._send(
                    422,
                    canonical_dumps(
                        {"error": str(exc), "errors": [{"path": "", "message": str(exc)}]}
                    ),
                )
                return
            if isinstance(result, RawJson):
                self._send(200, result.text)
            else:
                self._send(200, canonical_dumps(result))
            return
        if method == "GET" and self._try_static(path):
            return
        self._send(404, canonical_dumps({"error": f"no route for {method} {path}"}))

    def _try_static(self, path: str) -> bool:
        """Serve the built authoring client, when a ui dir is configured."""
        ui_dir: Path | None = getattr(self.server, "ui_dir", None)
        if ui_dir is None:
            return False
        name = path.lstrip("/") or "index.html"
        target = (ui_dir / name).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            return False
        content_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)
        return True

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PATCH(self):
        self._dispatch("PATCH")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self._send(204, "")


def create_server(
    data_dir: str | Path,
    port: int = 0,
    service: Service | None = None,
    verbose: bool = False,
    ui_dir: str | Path | None = None,
) -> tuple[ThreadingHTTPServer, Service]:
    """Bind a server (port 0 picks a free port). Caller runs serve_forever."""
    service = service or Service(data_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), ApiHandler)
    server.daemon_threads = True
    server.service = service  # type: ignore[attr-defined]
    server.verbose = verbose  # type: ignore[attr-defined]
    server.ui_dir = Path(ui_dir) if ui_dir else None  # type: ignore[attr-defined]
    return server, service


def serve(
    data_dir: str | Path,
    port: int = DEFAULT_PORT,
    verbose: bool = True,
    ui_dir: str | Path | None = None,
) -> None:
    server, service = create_server(data_dir, port=port, verbose=verbose, ui_dir=ui_dir)
    host, bound_port = server.server_address[:2]
    print(f"motionloom service on http://{host}:{bound_port} (data: {data_dir})")
    if ui_dir:
        print(f"serving authoring client from {ui_dir}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        service.close()
        server.server_close()
