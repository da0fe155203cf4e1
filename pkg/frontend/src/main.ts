// Application wiring: connection banner, step editor, scan composer,
// generation jobs, playback, and metrics display.

import { ApiClient, ApiError, OfflineError } from "./api.js";
import { FloorPlan } from "./floorplan.js";
import { metricsView } from "./metricsPanel.js";
import { PlaybackViewer } from "./playback.js";
import { composeScanLog } from "./scan.js";
import { ProjectStore } from "./store.js";
import type { JobDto, StepDto } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const store = new ProjectStore();
let api = new ApiClient("http://127.0.0.1:8765");
let selected = new Set<string>();
let activeJobPoll: number | null = null;

const banner = $("banner");
const stepList = $("step-list");
const statusLine = $("status-line");

function setStatus(text: string, isError = false): void {
  statusLine.textContent = text;
  statusLine.className = isError ? "status error" : "status";
}

function guard<A extends unknown[]>(fn: (...args: A) => Promise<void>): (...args: A) => void {
  return (...args) => {
    fn(...args).catch((err) => {
      if (err instanceof OfflineError) {
        store.setOffline(true);
      } else if (err instanceof ApiError) {
        setStatus(`server rejected the request: ${err.message}`, true);
      } else {
        setStatus(String(err), true);
      }
    });
  };
}

// -- connection ---------------------------------------------------------------

async function connect(): Promise<void> {
  api = new ApiClient(($("server-url") as HTMLInputElement).value.replace(/\/$/, ""));
  try {
    const health = await api.health();
    store.setOffline(false);
    setStatus(`connected (service ${health.version})`);
  } catch {
    store.setOffline(true);
    setStatus("service unreachable", true);
  }
}

$("connect").addEventListener("click", guard(connect));

setInterval(() => {
  // passive reconnect probe while offline
  if (store.offline) {
    api.health().then(
      () => store.setOffline(false),
      () => undefined,
    );
  }
}, 3000);

// -- project / task -------------------------------------------------------------

$("new-project").addEventListener(
  "click",
  guard(async () => {
    const project = await api.createProject();
    store.fromServer(project);
    selected = new Set();
    setStatus(`project ${project.id} created`);
  }),
);

$("refine").addEventListener(
  "click",
  guard(async () => {
    const project = store.project;
    if (!project) throw new Error("create a project first");
    const text = ($("task-text") as HTMLInputElement).value;
    await api.setTask(project.id, text);
    store.fromServer(await api.getProject(project.id));
    setStatus("steps refined; edit, group, then contextualize");
  }),
);

// -- step editor -------------------------------------------------------------------

function stepRow(step: StepDto): HTMLElement {
  const row = document.createElement("li");
  row.className = `step ${step.status}`;
  if (selected.has(step.id)) row.classList.add("selected");
  if (store.groupOf(step.id)) row.classList.add("grouped");

  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.checked = selected.has(step.id);
  checkbox.disabled = store.offline;
  checkbox.addEventListener("change", () => {
    checkbox.checked ? selected.add(step.id) : selected.delete(step.id);
    renderSteps();
  });

  const label = document.createElement("span");
  label.textContent = `${step.text} `;
  const badge = document.createElement("em");
  badge.textContent = `[${step.status}${step.scale === "hands_only" ? ", hands" : ""}]`;
  label.appendChild(badge);

  const buttons = document.createElement("span");
  buttons.className = "row-buttons";
  const mk = (name: string, handler: () => void) => {
    const b = document.createElement("button");
    b.textContent = name;
    b.disabled = store.offline;
    b.addEventListener("click", handler);
    buttons.appendChild(b);
  };
  mk("modify", guard(async () => {
    const text = window.prompt("new step text", step.text);
    if (!text) return;
    const token = store.beginOptimistic((draft) => {
      const target = draft.steps.find((s) => s.id === step.id);
      if (target) {
        target.text = text;
        target.status = "draft";
      }
    });
    try {
      await api.editStep(store.project!.id, step.id, { text });
      store.commit(token, await api.getProject(store.project!.id));
    } catch (err) {
      store.rollback(token);
      throw err;
    }
  }));
  mk("scale", guard(async () => {
    const next = step.scale === "full_body" ? "hands_only" : "full_body";
    const token = store.beginOptimistic((draft) => {
      const target = draft.steps.find((s) => s.id === step.id);
      if (target) target.scale = next;
    });
    try {
      await api.editStep(store.project!.id, step.id, { scale: next });
      store.commit(token, await api.getProject(store.project!.id));
    } catch (err) {
      store.rollback(token);
      throw err;
    }
  }));
  mk("+before", guard(async () => insertRelative(step.id, 0)));
  mk("+after", guard(async () => insertRelative(step.id, 1)));
  mk("delete", guard(async () => {
    const token = store.beginOptimistic((draft) => {
      draft.steps = draft.steps.filter((s) => s.id !== step.id);
    });
    try {
      await api.deleteStep(store.project!.id, step.id);
      store.commit(token, await api.getProject(store.project!.id));
    } catch (err) {
      store.rollback(token);
      throw err;
    }
  }));

  row.append(checkbox, label, buttons);
  return row;
}

async function insertRelative(stepId: string, offset: number): Promise<void> {
  const project = store.project!;
  const text = window.prompt("new step text");
  if (!text) return;
  const index = project.steps.findIndex((s) => s.id === stepId) + offset;
  await api.insertStep(project.id, text, index);
  store.fromServer(await api.getProject(project.id));
}

$("group-selected").addEventListener(
  "click",
  guard(async () => {
    const project = store.project;
    if (!project) throw new Error("create a project first");
    const group = await api.createGroup(project.id, [...selected]);
    selected = new Set();
    store.fromServer(await api.getProject(project.id));
    setStatus(`group ${group.id} created; draw its scan on the floor plan`);
    const picker = $("scan-group") as HTMLSelectElement;
    picker.value = group.id;
  }),
);

function renderSteps(): void {
  stepList.textContent = "";
  for (const step of store.project?.steps ?? []) stepList.appendChild(stepRow(step));
  const picker = $("scan-group") as HTMLSelectElement;
  const current = picker.value;
  picker.textContent = "";
  for (const group of store.project?.groups ?? []) {
    const option = document.createElement("option");
    option.value = group.id;
    option.textContent = `${group.id} (${group.step_ids.join(", ")})`;
    picker.appendChild(option);
  }
  if (current) picker.value = current;
}

// -- scan composer -------------------------------------------------------------------

const floor = new FloorPlan(
  $("floor-canvas") as HTMLCanvasElement,
  () => window.prompt("object id (referenced by step texts)"),
);

$("mode-draw").addEventListener("click", () => (floor.mode = "draw"));
$("mode-object").addEventListener("click", () => (floor.mode = "object"));
$("floor-clear").addEventListener("click", () => floor.clear());

$("submit-scan").addEventListener(
  "click",
  guard(async () => {
    const project = store.project;
    if (!project) throw new Error("create a project first");
    const groupId = ($("scan-group") as HTMLSelectElement).value;
    if (!groupId) throw new Error("group some steps first");
    const scan = composeScanLog(floor.path, floor.objects);
    const result = await api.uploadScan(project.id, groupId, scan.lines);
    store.fromServer(await api.getProject(project.id));
    const warnings = [...scan.warnings, ...result.warnings];
    setStatus(
      `scan attached to ${groupId}: ${scan.totalLengthM.toFixed(1)} m over ` +
        `${scan.durationS.toFixed(2)} s${warnings.length ? "; " + warnings.join("; ") : ""}`,
    );
  }),
);

// -- generation + playback ----------------------------------------------------------------

const viewer = new PlaybackViewer(
  $("top-canvas") as HTMLCanvasElement,
  $("side-canvas") as HTMLCanvasElement,
  $("scrubber") as HTMLInputElement,
  $("marker-lane"),
  $("clock"),
);

$("play").addEventListener("click", () => viewer.togglePlay());

function renderMetrics(report: Parameters<typeof metricsView>[0]): void {
  const view = metricsView(report);
  const table = $("metrics-table");
  table.textContent = "";
  for (const row of view.rows) {
    const tr = document.createElement("tr");
    for (const cell of [row.label, row.naive, row.smoothed]) {
      const td = document.createElement("td");
      td.textContent = cell;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  $("ratio-line").textContent = view.ratioText;
  const badge = $("plausibility-badge");
  badge.textContent = view.badgeText;
  badge.className = `badge ${view.badge}`;
}

async function onJobDone(job: JobDto): Promise<void> {
  if (job.state === "failed") {
    setStatus(`generation failed: ${job.error_detail}`, true);
    return;
  }
  const motion = await api.getMotion(job.result_motion_ref!);
  const report = await api.getMetrics(job.result_motion_ref!);
  viewer.load(motion, job.plan);
  floor.showPlan(job.plan);
  renderMetrics(report);
  setStatus(`motion ${job.result_motion_ref} ready: ${motion.frames.length} frames`);
}

$("generate").addEventListener(
  "click",
  guard(async () => {
    const project = store.project;
    if (!project) throw new Error("create a project first");
    const seed = Number(($("seed") as HTMLInputElement).value) || 0;
    const blendLen = Number(($("blend-len") as HTMLInputElement).value) || undefined;
    const job = await api.generate(project.id, { seed, blendLen });
    setStatus(`job ${job.id} queued`);
    if (activeJobPoll !== null) window.clearInterval(activeJobPoll);
    activeJobPoll = window.setInterval(
      guard(async () => {
        const current = await api.getJob(job.id);
        if (current.state === "done" || current.state === "failed") {
          window.clearInterval(activeJobPoll!);
          activeJobPoll = null;
          await onJobDone(current);
        } else {
          setStatus(`job ${current.id}: ${current.state}`);
        }
      }),
      500,
    );
  }),
);

// -- render loop -------------------------------------------------------------------------

store.subscribe(() => {
  banner.hidden = !store.offline;
  for (const button of document.querySelectorAll<HTMLButtonElement>("button[data-edit]")) {
    button.disabled = store.offline;
  }
  renderSteps();
});

connect().catch(() => store.setOffline(true));
