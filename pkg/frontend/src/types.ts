// Wire format shared with the generation service: an icon is a list of
// paths, each path a list of {kind, pts} commands on the 100x100 grid.

import { z } from "zod";

export const GRID = 100;

export type Kind = "M" | "L" | "C";

export interface Command {
  kind: Kind;
  pts: [number, number][];
}

export type PathCommands = Command[];
export type IconPaths = PathCommands[];

const zCoord = z.number().int().min(0).max(GRID - 1);
export const zPoint = z.tuple([zCoord, zCoord]);

export const zCommand = z
  .object({
    kind: z.enum(["M", "L", "C"]),
    pts: z.array(zPoint).min(1).max(3),
  })
  .refine((c) => c.pts.length === (c.kind === "C" ? 3 : 1), {
    message: "M/L take 1 point, C takes 3",
  });

export const zPath = z
  .array(zCommand)
  .min(1)
  .refine((cmds) => cmds.length === 0 || cmds[0]!.kind === "M", {
    message: "path must open with a MoveTo",
  });

export const zIcon = z.array(zPath).min(1);

// request bodies (the contract the service validates against)
export const zGenerateRequest = z.object({
  text: z.string(),
  count: z.number().int().min(1).max(32),
  seed: z.number().int().optional(),
});

export const zSuggestRequest = z.object({
  text: z.string(),
  partial: z.array(zPath), // may be empty
  seed: z.number().int().optional(),
});

export const zFillRequest = z.object({
  text: z.string(),
  left: z.array(zPath),
  right: z.array(zPath),
  seed: z.number().int().optional(),
});

// responses
export const zGenerateResponse = z.object({ icons: z.array(zIcon) });
export const zSuggestResponse = z.union([
  z.object({ path: zPath }),
  z.object({ end: z.literal(true) }),
]);
export const zFillResponse = z.object({ icon: zIcon });
export const zHealthResponse = z.object({
  status: z.string(),
  checkpoint_id: z.string().nullable().optional(),
});

export type GenerateRequest = z.infer<typeof zGenerateRequest>;
export type SuggestRequest = z.infer<typeof zSuggestRequest>;
export type FillRequest = z.infer<typeof zFillRequest>;
