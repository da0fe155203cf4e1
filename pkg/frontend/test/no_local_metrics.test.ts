// Code-level assertion of the "no pipeline math in the client" invariant:
// every metric number shown comes verbatim from the service report.

import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { metricsView } from "../src/metricsPanel.js";

const SRC = fileURLToPath(new URL("../src", import.meta.url));

function source(name: string): string {
  return readFileSync(join(SRC, name), "utf-8");
}

describe("the client computes no metrics locally", () => {
  it("metricsPanel contains no arithmetic and never touches frames", () => {
    const text = source("metricsPanel.ts");
    expect(text).not.toMatch(/Math\./);
    expect(text).not.toMatch(/\breduce\(/);
    expect(text).not.toMatch(/\bframes\b/);
    // no arithmetic operators outside comments/strings (toFixed is formatting)
    const code = text
      .split("\n")
      .map((line) => line.replace(/\/\/.*$/, ""))
      .join("\n")
      .replace(/"[^"]*"|'[^']*'|`[^`]*`/g, '""');
    expect(code).not.toMatch(/[0-9a-zA-Z_)\]]\s*[-+*/]\s*[0-9a-zA-Z_(]/);
  });

  it("metric field names are only ever read, never assigned or derived", () => {
    for (const file of readdirSync(SRC)) {
      const text = source(file);
      for (const field of ["transition_m", "spatial_m", "ratio", "plausible"]) {
        // property writes like `x.transition_m = ...` would mean local computation
        const writer = new RegExp(`\\.${field}\\s*=[^=]`);
        expect(text, `${file} writes ${field}`).not.toMatch(writer);
      }
    }
  });

  it("norms/distances never appear outside drawing and scan-authoring geometry", () => {
    // Math.hypot is legitimate for measuring the drawn path (scan authoring)
    // and nowhere else; no file computes sqrt at all.
    for (const file of readdirSync(SRC)) {
      const text = source(file);
      expect(text, `${file} uses Math.sqrt`).not.toMatch(/Math\.sqrt/);
      if (file !== "scan.ts") {
        expect(text, `${file} uses Math.hypot`).not.toMatch(/Math\.hypot/);
      }
    }
  });

  it("renders report values verbatim", () => {
    const view = metricsView({
      naive: { transition_m: 0.4620235, spatial_m: 1.125 },
      smoothed: { transition_m: 0.1451648, spatial_m: 1.1655461 },
      ratio: 3.1827515,
      plausible: false,
    });
    expect(view.rows[0].naive).toBe("0.4620 m");
    expect(view.rows[0].smoothed).toBe("0.1452 m");
    expect(view.rows[1].smoothed).toBe("1.1655 m");
    expect(view.ratioText).toBe("improvement: 3.18x");
    expect(view.badge).toBe("red");
  });

  it("badge follows the served plausible flag exactly", () => {
    expect(metricsView({ naive: { transition_m: null, spatial_m: null }, smoothed: { transition_m: null, spatial_m: 0.09 }, ratio: null, plausible: true }).badge).toBe("green");
    expect(metricsView({ naive: { transition_m: null, spatial_m: null }, smoothed: { transition_m: null, spatial_m: 0.09 }, ratio: null, plausible: null }).badge).toBe("none");
    expect(metricsView(null).badge).toBe("none");
  });

  it("handles the service's 'inf' ratio encoding without computing anything", () => {
    const view = metricsView({
      naive: { transition_m: 1.0, spatial_m: null },
      smoothed: { transition_m: 0.0, spatial_m: null },
      ratio: "inf",
      plausible: null,
    });
    expect(view.ratioText).toMatch(/unbounded/);
  });
});
