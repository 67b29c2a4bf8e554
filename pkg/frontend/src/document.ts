// Canvas document: the user's paths, the current selection, the prompt,
// and at most one pending (not yet accepted) suggestion. All generative
// behavior goes through the injected ApiClient; a newer request always
// cancels the effect of older in-flight ones.

import { ApiClient } from "./api.js";
import { exportSvg } from "./export.js";
import { IconPaths, PathCommands, zIcon } from "./types.js";

export type SuggestionState = "idle" | "pending" | "offered" | "end";

export class CanvasDocument {
  paths: IconPaths = [];
  selection = new Set<number>();
  prompt = "";
  pendingSuggestion: PathCommands | null = null;
  suggestionState: SuggestionState = "idle";

  private requestToken = 0;
  private seedCounter = 0;

  constructor(private api: ApiClient) {}

  // --- drawing ---

  addPath(path: PathCommands): void {
    zIcon.element.parse(path); // enforce wire validity at the boundary
    this.paths.push(path);
    this.discardSuggestion();
  }

  removeSelected(): IconPaths {
    const removed = this.paths.filter((_, i) => this.selection.has(i));
    this.paths = this.paths.filter((_, i) => !this.selection.has(i));
    this.selection.clear();
    return removed;
  }

  toggleSelect(index: number): void {
    if (this.selection.has(index)) this.selection.delete(index);
    else if (index >= 0 && index < this.paths.length) this.selection.add(index);
  }

  // --- suggestion workflow (request -> offered -> accept/reject) ---

  private nextToken(): number {
    return ++this.requestToken;
  }

  private nextSeed(): number {
    return this.seedCounter++;
  }

  async requestSuggestion(seed?: number): Promise<SuggestionState> {
    const token = this.nextToken();
    this.suggestionState = "pending";
    this.pendingSuggestion = null;
    const path = await this.api.suggest({
      text: this.prompt,
      partial: this.paths,
      seed: seed ?? this.nextSeed(),
    });
    if (token !== this.requestToken) return this.suggestionState; // superseded
    if (path === null) {
      this.suggestionState = "end";
    } else {
      this.pendingSuggestion = path;
      this.suggestionState = "offered";
    }
    return this.suggestionState;
  }

  acceptSuggestion(): void {
    if (this.suggestionState !== "offered" || this.pendingSuggestion === null) {
      throw new Error("no suggestion to accept");
    }
    this.paths.push(this.pendingSuggestion);
    this.discardSuggestion();
  }

  rejectSuggestion(): void {
    if (this.suggestionState !== "offered") throw new Error("no suggestion to reject");
    this.discardSuggestion();
  }

  discardSuggestion(): void {
    this.pendingSuggestion = null;
    this.suggestionState = "idle";
  }

  // --- whole-icon generation and selected-path regeneration ---

  async generateFromPrompt(seed?: number): Promise<void> {
    const token = this.nextToken();
    const icons = await this.api.generate({
      text: this.prompt,
      count: 1,
      seed: seed ?? this.nextSeed(),
    });
    if (token !== this.requestToken) return;
    if (icons.length > 0) {
      this.paths = icons[0]!;
      this.selection.clear();
      this.discardSuggestion();
    }
  }

  /** Delete the selected (contiguous) paths and refill the gap from the
   * surrounding context. */
  async regenerateSelected(seed?: number): Promise<void> {
    if (this.selection.size === 0) throw new Error("nothing selected");
    const indices = [...this.selection].sort((a, b) => a - b);
    const contiguous = indices.every((v, i) => i === 0 || v === indices[i - 1]! + 1);
    if (!contiguous) throw new Error("selected paths must be contiguous");
    const lo = indices[0]!;
    const hi = indices[indices.length - 1]!;
    const left = this.paths.slice(0, lo);
    const right = this.paths.slice(hi + 1);
    const token = this.nextToken();
    const icon = await this.api.fill({
      text: this.prompt,
      left,
      right,
      seed: seed ?? this.nextSeed(),
    });
    if (token !== this.requestToken) return;
    this.paths = icon;
    this.selection.clear();
    this.discardSuggestion();
  }

  // --- export ---

  exportSvg(includeXmlns = true): string {
    return exportSvg(this.paths, includeXmlns);
  }
}
