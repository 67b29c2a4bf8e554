// DOM wiring for the design surface: draw integer-grid paths, ask the
// service for the next path (green overlay; blue = your paths), accept or
// reject suggestions, regenerate selected paths, and export canonical SVG.

import { ApiClient, ApiError } from "./api.js";
import { CanvasDocument } from "./document.js";
import { pathD } from "./export.js";
import { Command, GRID, PathCommands } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

type DrawMode = "line" | "curve";

class App {
  doc: CanvasDocument;
  draft: Command[] = [];
  draftClicks: [number, number][] = [];
  mode: DrawMode = "line";

  canvas: SVGSVGElement;
  status: HTMLElement;

  constructor(root: Document, api: ApiClient) {
    this.doc = new CanvasDocument(api);
    this.canvas = root.getElementById("canvas") as unknown as SVGSVGElement;
    this.status = root.getElementById("status")!;

    this.canvas.addEventListener("click", (ev) => this.onCanvasClick(ev));
    root.getElementById("mode-line")!.addEventListener("click", () => (this.mode = "line"));
    root.getElementById("mode-curve")!.addEventListener("click", () => (this.mode = "curve"));
    this.bind(root, "finish-path", () => this.finishPath(false));
    this.bind(root, "close-path", () => this.finishPath(true));
    this.bind(root, "suggest", () => this.suggest());
    this.bind(root, "accept", () => this.accept());
    this.bind(root, "reject", () => this.rejectAndRetry());
    this.bind(root, "generate", () => this.generate());
    this.bind(root, "regenerate", () => this.regenerateSelected());
    this.bind(root, "delete", () => {
      this.doc.removeSelected();
      this.render();
    });
    this.bind(root, "export", () => this.download());
    const promptBox = root.getElementById("prompt") as HTMLInputElement;
    promptBox.addEventListener("input", () => (this.doc.prompt = promptBox.value));
    this.render();
  }

  bind(root: Document, id: string, fn: () => void | Promise<void>) {
    root.getElementById(id)!.addEventListener("click", () => {
      Promise.resolve(fn()).catch((err) => this.showError(err));
    });
  }

  showError(err: unknown) {
    if (err instanceof ApiError && err.status === 422) {
      this.status.textContent = `icon too large for the model's budget: ${err.message}`;
    } else if (err instanceof Error) {
      this.status.textContent = `${err.message} (retry?)`;
    } else {
      this.status.textContent = String(err);
    }
  }

  snap(ev: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const x = Math.round(((ev.clientX - rect.left) / rect.width) * (GRID - 1));
    const y = Math.round(((ev.clientY - rect.top) / rect.height) * (GRID - 1));
    const clamp = (v: number) => Math.max(0, Math.min(GRID - 1, v));
    return [clamp(x), clamp(y)];
  }

  onCanvasClick(ev: MouseEvent) {
    const pt = this.snap(ev);
    if (this.draft.length === 0) {
      this.draft.push({ kind: "M", pts: [pt] });
    } else if (this.mode === "line") {
      this.draft.push({ kind: "L", pts: [pt] });
    } else {
      this.draftClicks.push(pt);
      if (this.draftClicks.length === 3) {
        this.draft.push({ kind: "C", pts: [...this.draftClicks] as Command["pts"] });
        this.draftClicks = [];
      }
    }
    this.render();
  }

  finishPath(close: boolean) {
    if (this.draft.length === 0) return;
    if (close && this.draft.length > 1) {
      const start = this.draft[0]!.pts[0]!;
      this.draft.push({ kind: "L", pts: [start] });
    }
    this.doc.addPath(this.draft as PathCommands);
    this.draft = [];
    this.draftClicks = [];
    this.status.textContent = "";
    this.render();
  }

  async suggest() {
    this.status.textContent = "asking for a suggestion…";
    const state = await this.doc.requestSuggestion();
    this.status.textContent =
      state === "end" ? "the model considers this icon complete" : "";
    this.render();
  }

  accept() {
    this.doc.acceptSuggestion();
    this.render();
  }

  async rejectAndRetry() {
    this.doc.rejectSuggestion();
    this.render();
    await this.suggest(); // new seed comes from the document's counter
  }

  async generate() {
    this.status.textContent = "generating…";
    await this.doc.generateFromPrompt();
    this.status.textContent = "";
    this.render();
  }

  async regenerateSelected() {
    this.status.textContent = "refilling selection…";
    await this.doc.regenerateSelected();
    this.status.textContent = "";
    this.render();
  }

  download() {
    const blob = new Blob([this.doc.exportSvg(true)], { type: "image/svg+xml" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "icon.svg";
    a.click();
    URL.revokeObjectURL(a.href);
  }

  render() {
    while (this.canvas.firstChild) this.canvas.removeChild(this.canvas.firstChild);
    const add = (path: PathCommands, cls: string, index?: number) => {
      const el = document.createElementNS(SVG_NS, "path");
      el.setAttribute("d", pathD(path));
      el.setAttribute("class", cls);
      if (index !== undefined) {
        el.addEventListener("click", (ev) => {
          ev.stopPropagation();
          this.doc.toggleSelect(index);
          this.render();
        });
      }
      this.canvas.appendChild(el);
    };
    this.doc.paths.forEach((p, i) =>
      add(p, this.doc.selection.has(i) ? "user selected" : "user", i),
    );
    if (this.draft.length > 0) add(this.draft as PathCommands, "draft");
    if (this.doc.pendingSuggestion) add(this.doc.pendingSuggestion, "suggestion");
  }
}

export function start() {
  const api = new ApiClient("");
  new App(document, api);
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  start();
}
