/** DOM glue: wires the controller to the editor, sliders and preview pane. */

import {
  CompileResponse,
  CompileTransport,
  Diagnostic,
  GutterMarker,
  ParamInfo,
  PlaygroundController,
  PlaygroundView,
} from "./controller.js";

const INITIAL_SOURCE = `side := 10;
draw (0,0) -- (side,0) -- (side,side) -- (0,side) -- (0,0);
`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const editor = el<HTMLTextAreaElement>("editor");
const gutter = el<HTMLDivElement>("gutter");
const preview = el<HTMLDivElement>("preview");
const diagnosticsPane = el<HTMLPreElement>("diagnostics");
const slidersPane = el<HTMLDivElement>("sliders");
const banner = el<HTMLDivElement>("banner");
const status = el<HTMLSpanElement>("status");
const debugToggle = el<HTMLInputElement>("debug");
const zoom = el<HTMLInputElement>("zoom");

let markers: GutterMarker[] = [];

function renderGutter(): void {
  const lines = editor.value.split("\n").length;
  const marked = new Map(markers.map((m) => [m.line, m.message]));
  const rows: string[] = [];
  for (let i = 1; i <= lines; i++) {
    const message = marked.get(i);
    rows.push(
      message
        ? `<div class="gutter-line error" title="${escapeHtml(message)}">${i}</div>`
        : `<div class="gutter-line">${i}</div>`,
    );
  }
  gutter.innerHTML = rows.join("");
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;")
    .replace(/"/g, "&quot;");
}

const view: PlaygroundView = {
  showPreview(svg: string): void {
    preview.innerHTML = svg;
    applyZoom();
  },
  setStale(stale: boolean): void {
    preview.classList.toggle("stale", stale);
  },
  showDiagnostics(diagnostics: Diagnostic[]): void {
    diagnosticsPane.textContent = diagnostics
      .map((d) => `${d.line}:${d.col}: ${d.severity}: ${d.message}`)
      .join("\n");
  },
  setGutterMarkers(next: GutterMarker[]): void {
    markers = next;
    renderGutter();
  },
  setSliders(params: ParamInfo[]): void {
    renderSliders(params);
  },
  setBanner(message: string | null): void {
    banner.textContent = message ?? "";
    banner.classList.toggle("visible", message !== null);
  },
  setStatus(text: string): void {
    status.textContent = text;
  },
};

const transport: CompileTransport = async (req, signal) => {
  const res = await fetch("/api/compile", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(req),
    signal,
  });
  return (await res.json()) as CompileResponse;
};

const controller = new PlaygroundController(transport, view);

let sliderNames = "";

function renderSliders(params: ParamInfo[]): void {
  const signature = params.map((p) => p.name).join(",");
  if (signature === sliderNames) {
    return; // keep slider positions while the user drags
  }
  sliderNames = signature;
  slidersPane.innerHTML = "";
  for (const param of params) {
    const row = document.createElement("label");
    row.className = "slider-row";
    const caption = document.createElement("span");
    caption.textContent = `${param.name} = ${param.value}`;
    const input = document.createElement("input");
    input.type = "range";
    const magnitude = Math.max(Math.abs(param.value), 10);
    input.min = "0";
    input.max = String(magnitude * 2);
    input.step = String(magnitude / 100);
    input.value = String(param.value);
    input.addEventListener("input", () => {
      const value = Number(input.value);
      caption.textContent = `${param.name} = ${value}`;
      controller.setOverride(param.name, value);
    });
    row.appendChild(caption);
    row.appendChild(input);
    slidersPane.appendChild(row);
  }
}

function applyZoom(): void {
  const svg = preview.querySelector("svg");
  if (svg) {
    svg.style.width = `${zoom.valueAsNumber}%`;
  }
}

editor.value = INITIAL_SOURCE;
editor.addEventListener("input", () => {
  renderGutter();
  controller.setSource(editor.value);
});
editor.addEventListener("scroll", () => {
  gutter.scrollTop = editor.scrollTop;
});
debugToggle.addEventListener("change", () => {
  controller.setDebug(debugToggle.checked);
});
zoom.addEventListener("input", applyZoom);

renderGutter();
controller.setSource(INITIAL_SOURCE);
controller.flush();
