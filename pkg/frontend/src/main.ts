/** App wiring: seed selection, the training loop, and the results list.
 *
 * One outstanding request at a time; inputs are disabled while a call is in
 * flight. Network failures surface a banner with a retry button.
 */

import { ApiClient, ApiError, QueryPayload } from "./api.js";
import { GRID_SIZE, demoGrid } from "./demo.js";
import { heatmapBytes, rampBytes } from "./colormap.js";
import { buildResultRows, exportString } from "./results.js";

const PRESET_SEEDS = [
  "#4E79A7", "#F28E2B", "#E15759", "#76B7B2", "#59A14F",
  "#EDC948", "#B07AA1", "#FF9DA7", "#9C755F", "#BAB0AC",
];

const api = new ApiClient("");
const grid = demoGrid();

let sessionId: string | null = null;
let currentQuery: QueryPayload | null = null;
let busy = false;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function show(section: "setup" | "train" | "results") {
  for (const name of ["setup", "train", "results"]) {
    $(name).style.display = name === section ? "" : "none";
  }
}

function banner(message: string | null, retry?: () => void) {
  const el = $("banner");
  el.innerHTML = "";
  if (message === null) {
    el.style.display = "none";
    return;
  }
  el.style.display = "";
  el.textContent = message + " ";
  if (retry) {
    const btn = document.createElement("button");
    btn.textContent = "retry";
    btn.onclick = () => {
      banner(null);
      retry();
    };
    el.appendChild(btn);
  }
}

function paint(canvas: HTMLCanvasElement, width: number, height: number, bytes: Uint8ClampedArray) {
  canvas.width = width;
  canvas.height = height;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const img = ctx.createImageData(width, height);
  img.data.set(bytes);
  ctx.putImageData(img, 0, 0);
}

function paintHeatmap(canvas: HTMLCanvasElement, colors: string[]) {
  paint(canvas, GRID_SIZE, GRID_SIZE, heatmapBytes(grid, GRID_SIZE, colors));
}

function paintRamp(canvas: HTMLCanvasElement, colors: string[]) {
  paint(canvas, colors.length, 1, rampBytes(colors));
}

async function guarded(work: () => Promise<void>, retry: () => void) {
  if (busy) return;
  busy = true;
  setInputsDisabled(true);
  try {
    await work();
  } catch (e) {
    banner(e instanceof ApiError ? `server error: ${e.message}` : `network failure: ${e}`, retry);
  } finally {
    busy = false;
    setInputsDisabled(false);
  }
}

function setInputsDisabled(disabled: boolean) {
  for (const id of ["choose-left", "choose-right", "choose-same", "start"]) {
    ($(id) as HTMLButtonElement).disabled = disabled;
  }
}

function startSession() {
  const seed = ($("seed-input") as HTMLInputElement).value.trim();
  void guarded(async () => {
    const info = await api.createSession(seed);
    sessionId = info.session_id;
    $("candidate-count").textContent = `${info.candidate_count} candidate colormaps aligned to ${seed}`;
    show("train");
    await loadQuery();
  }, startSession);
}

async function loadQuery() {
  if (!sessionId) return;
  currentQuery = await api.getQuery(sessionId);
  paintHeatmap($("left-canvas") as HTMLCanvasElement, currentQuery.left);
  paintHeatmap($("right-canvas") as HTMLCanvasElement, currentQuery.right);
  $("progress").textContent = `${currentQuery.remaining} comparisons left — press 1 (left), 2 (right) or 0 (no preference)`;
}

function submit(choice: 0 | 1 | 2) {
  if (!sessionId || !currentQuery) return;
  const sid = sessionId;
  const qid = currentQuery.query_id;
  void guarded(async () => {
    const ack = await api.postResponse(sid, qid, choice);
    currentQuery = null;
    if (ack.remaining > 0) {
      await loadQuery();
    } else {
      $("progress").textContent = "ranking and creating your colormaps…";
      await showResults();
    }
  }, () => submit(choice));
}

async function showResults() {
  if (!sessionId) return;
  const results = await api.getResults(sessionId);
  const rows = buildResultRows(results);
  const list = $("result-list");
  list.innerHTML = "";
  for (const row of rows) {
    const item = document.createElement("li");
    item.className = row.pinned ? "result pinned" : "result";
    const canvas = document.createElement("canvas");
    canvas.className = "ramp";
    paintRamp(canvas, row.colors);
    const label = document.createElement("span");
    label.textContent = row.score !== null ? `${row.label}  (${row.score.toFixed(3)})` : row.label;
    const copy = document.createElement("button");
    copy.textContent = "copy hex";
    copy.onclick = () => {
      void navigator.clipboard.writeText(exportString(row.colors));
      copy.textContent = "copied!";
      setTimeout(() => (copy.textContent = "copy hex"), 1200);
    };
    item.append(canvas, label, copy);
    list.appendChild(item);
  }
  show("results");
}

function init() {
  const swatches = $("swatches");
  for (const hex of PRESET_SEEDS) {
    const b = document.createElement("button");
    b.className = "swatch";
    b.style.background = hex;
    b.title = hex;
    b.onclick = () => {
      ($("seed-input") as HTMLInputElement).value = hex;
    };
    swatches.appendChild(b);
  }
  $("start").onclick = startSession;
  $("choose-left").onclick = () => submit(1);
  $("choose-right").onclick = () => submit(2);
  $("choose-same").onclick = () => submit(0);
  document.addEventListener("keydown", (ev) => {
    if ($("train").style.display === "none") return;
    if (ev.key === "1") submit(1);
    else if (ev.key === "2") submit(2);
    else if (ev.key === "0") submit(0);
  });
  show("setup");
}

init();
