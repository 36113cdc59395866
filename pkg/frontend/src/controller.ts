/**
 * Playground controller: editor state, debounced compiles, response ordering.
 *
 * All side effects go through the injected transport/view/scheduler, so the
 * whole control flow is testable without a DOM or a server. Invariants:
 * no request is issued while a newer edit is still pending (debounce), at
 * most one request is in flight (older ones are aborted), and a response is
 * applied only if no newer response has been applied already.
 */

export interface Diagnostic {
  severity: "error" | "warning";
  message: string;
  line: number;
  col: number;
}

export interface ParamInfo {
  name: string;
  value: number;
}

export interface CompileRequest {
  source: string;
  overrides: Record<string, number>;
  debug: boolean;
  timeout_ms: number;
}

export interface CompileResponse {
  svg: string | null;
  diagnostics: Diagnostic[];
  elapsed_ms: number;
  params?: ParamInfo[];
}

/** Issues one compile; rejects with DOMException("AbortError") if aborted. */
export type CompileTransport = (
  req: CompileRequest,
  signal: AbortSignal,
) => Promise<CompileResponse>;

export interface GutterMarker {
  line: number;
  message: string;
}

export interface PlaygroundView {
  showPreview(svg: string): void;
  setStale(stale: boolean): void;
  showDiagnostics(diagnostics: Diagnostic[]): void;
  setGutterMarkers(markers: GutterMarker[]): void;
  setSliders(params: ParamInfo[]): void;
  setBanner(message: string | null): void;
  setStatus(text: string): void;
}

export interface Scheduler {
  schedule(fn: () => void, ms: number): number;
  cancel(id: number): void;
}

const defaultScheduler: Scheduler = {
  schedule: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  cancel: (id) => clearTimeout(id),
};

export interface ControllerOptions {
  debounceMs?: number;
  timeoutMs?: number;
  scheduler?: Scheduler;
}

export function errorMarkers(diagnostics: Diagnostic[]): GutterMarker[] {
  return diagnostics
    .filter((d) => d.severity === "error")
    .map((d) => ({ line: d.line, message: d.message }));
}

export class PlaygroundController {
  source = "";
  overrides: Record<string, number> = {};
  debug = false;
  lastResponse: CompileResponse | null = null;

  private readonly transport: CompileTransport;
  private readonly view: PlaygroundView;
  private readonly scheduler: Scheduler;
  private readonly debounceMs: number;
  private readonly timeoutMs: number;

  private pendingTimer: number | null = null;
  private inflight: AbortController | null = null;
  private issuedSeq = 0;
  private appliedSeq = 0;

  constructor(
    transport: CompileTransport,
    view: PlaygroundView,
    options: ControllerOptions = {},
  ) {
    this.transport = transport;
    this.view = view;
    this.scheduler = options.scheduler ?? defaultScheduler;
    this.debounceMs = options.debounceMs ?? 250;
    this.timeoutMs = options.timeoutMs ?? 3000;
  }

  /** Editor text changed: mark the preview stale and debounce a compile. */
  setSource(text: string): void {
    this.source = text;
    this.view.setStale(true);
    this.scheduleCompile();
  }

  /** Slider moved: overrides change without touching the source text. */
  setOverride(name: string, value: number): void {
    this.overrides = { ...this.overrides, [name]: value };
    this.compileNow();
  }

  clearOverride(name: string): void {
    const next = { ...this.overrides };
    delete next[name];
    this.overrides = next;
    this.compileNow();
  }

  setDebug(flag: boolean): void {
    this.debug = flag;
    this.compileNow();
  }

  /** Compile immediately (initial load, explicit refresh). */
  flush(): void {
    this.compileNow();
  }

  get hasPendingEdit(): boolean {
    return this.pendingTimer !== null;
  }

  private scheduleCompile(): void {
    if (this.pendingTimer !== null) {
      this.scheduler.cancel(this.pendingTimer);
    }
    this.pendingTimer = this.scheduler.schedule(() => {
      this.pendingTimer = null;
      this.compileNow();
    }, this.debounceMs);
  }

  private compileNow(): void {
    if (this.pendingTimer !== null) {
      // A newer edit is pending; it will trigger its own compile.
      this.scheduler.cancel(this.pendingTimer);
      this.pendingTimer = null;
    }
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const seq = ++this.issuedSeq;
    this.view.setStatus("compiling…");
    const request: CompileRequest = {
      source: this.source,
      overrides: this.overrides,
      debug: this.debug,
      timeout_ms: this.timeoutMs,
    };
    this.transport(request, controller.signal).then(
      (response) => this.applyResponse(seq, response),
      (err) => this.handleFailure(seq, err),
    );
  }

  private applyResponse(seq: number, response: CompileResponse): void {
    if (seq <= this.appliedSeq) {
      return; // an answer to a newer request already landed
    }
    this.appliedSeq = seq;
    this.lastResponse = response;
    this.view.setBanner(null);
    this.view.showDiagnostics(response.diagnostics);
    this.view.setGutterMarkers(errorMarkers(response.diagnostics));
    if (response.params) {
      this.view.setSliders(response.params);
    }
    if (response.svg !== null) {
      this.view.showPreview(response.svg);
      this.view.setStale(false);
      this.view.setStatus(`ok (${response.elapsed_ms} ms)`);
    } else {
      // Keep the last good preview, just flagged stale.
      this.view.setStale(true);
      this.view.setStatus("errors");
    }
  }

  private handleFailure(seq: number, err: unknown): void {
    if (err instanceof DOMException && err.name === "AbortError") {
      return; // superseded on purpose
    }
    if (seq <= this.appliedSeq) {
      return;
    }
    // Network trouble: keep the last good preview and raise the banner.
    this.view.setBanner("compile service unreachable — showing last result");
    this.view.setStatus("offline");
  }
}
