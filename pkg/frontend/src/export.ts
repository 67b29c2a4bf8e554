// Canonical SVG emission mirroring the service's codec: integer absolute
// M/L/C commands, fixed whitespace, black fill. The exported document
// reparses through the backend codec to exactly the same paths.

import { GRID, IconPaths, PathCommands } from "./types.js";

const XMLNS = "http://www.w3.org/2000/svg";

export function pathD(path: PathCommands): string {
  const parts: string[] = [];
  for (const cmd of path) {
    parts.push(cmd.kind);
    for (const [x, y] of cmd.pts) parts.push(String(x), String(y));
  }
  return parts.join(" ");
}

export function exportSvg(paths: IconPaths, includeXmlns = false): string {
  const ns = includeXmlns ? ` xmlns="${XMLNS}"` : "";
  const body = paths.map((p) => `<path d="${pathD(p)}" fill="black"/>`).join("");
  return `<svg${ns} viewBox="0 0 ${GRID} ${GRID}">${body}</svg>`;
}
