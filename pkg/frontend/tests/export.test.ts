// The exporter must emit the canonical form the backend codec parses;
// the committed fixture is cross-checked by the backend's test suite.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { exportSvg, pathD } from "../src/export.js";
import { PathCommands } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

const rect: PathCommands = [
  { kind: "M", pts: [[10, 10]] },
  { kind: "L", pts: [[60, 10]] },
  { kind: "L", pts: [[60, 60]] },
  { kind: "L", pts: [[10, 60]] },
  { kind: "L", pts: [[10, 10]] },
];

describe("canonical export", () => {
  it("formats the d attribute with single spaces and integers", () => {
    expect(pathD(rect)).toBe("M 10 10 L 60 10 L 60 60 L 10 60 L 10 10");
  });

  it("emits the canonical document", () => {
    expect(exportSvg([rect])).toBe(
      '<svg viewBox="0 0 100 100">'
      + '<path d="M 10 10 L 60 10 L 60 60 L 10 60 L 10 10" fill="black"/></svg>',
    );
  });

  it("matches the committed fixture consumed by the backend tests", () => {
    const fixture = readFileSync(join(here, "..", "fixtures", "export_rect.svg"), "utf-8");
    expect(exportSvg([rect], true) + "\n").toBe(fixture);
  });

  it("cubic commands serialize all three points in order", () => {
    const curve: PathCommands = [
      { kind: "M", pts: [[0, 50]] },
      { kind: "C", pts: [[10, 10], [40, 10], [50, 50]] },
    ];
    expect(pathD(curve)).toBe("M 0 50 C 10 10 40 10 50 50");
  });
});
