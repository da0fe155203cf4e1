import { describe, expect, it } from "vitest";

import {
  validateEditPayload,
  validateGeneratePayload,
  validateGroupPayload,
  validateScanLines,
  validateStepPayload,
  validateTaskPayload,
} from "../src/api.js";
import { composeScanLog } from "../src/scan.js";

describe("payload validation before send", () => {
  it("task text", () => {
    expect(validateTaskPayload("Use a 3D printer")).toEqual({ text: "Use a 3D printer" });
    expect(() => validateTaskPayload("")).toThrow();
    expect(() => validateTaskPayload("   ")).toThrow();
    expect(() => validateTaskPayload(42)).toThrow();
  });

  it("step insert / edit", () => {
    expect(validateStepPayload("x", 0)).toEqual({ text: "x", index: 0 });
    expect(validateStepPayload("x")).toEqual({ text: "x" });
    expect(() => validateStepPayload("x", -1)).toThrow();
    expect(() => validateStepPayload("x", 1.5)).toThrow();
    expect(validateEditPayload({ scale: "hands_only" })).toEqual({ scale: "hands_only" });
    expect(() => validateEditPayload({ scale: "torso_only" })).toThrow();
    expect(() => validateEditPayload({})).toThrow();
  });

  it("grouping", () => {
    expect(validateGroupPayload(["s1", "s2"])).toEqual({ step_ids: ["s1", "s2"] });
    expect(() => validateGroupPayload([])).toThrow();
    expect(() => validateGroupPayload("s1")).toThrow();
    expect(() => validateGroupPayload([""])).toThrow();
  });

  it("generation", () => {
    expect(validateGeneratePayload({ seed: 7, blendLen: 15 })).toEqual({ seed: 7, blend_len: 15 });
    expect(validateGeneratePayload({ seed: 0 })).toEqual({ seed: 0 });
    expect(() => validateGeneratePayload({ seed: 1.5 })).toThrow();
    expect(() => validateGeneratePayload({ seed: 1, blendLen: 1 })).toThrow();
    expect(() => validateGeneratePayload({ seed: 1, guidanceScale: -2 })).toThrow();
  });

  it("accepts every scan log the composer can produce", () => {
    let state = 99;
    const rand = () => {
      state = (state * 48271) % 2147483647;
      return state / 2147483647;
    };
    for (let trial = 0; trial < 40; trial++) {
      const n = 2 + Math.floor(rand() * 10);
      const path = Array.from({ length: n }, () => ({ x: rand() * 8, y: rand() * 8 }));
      const objects =
        rand() < 0.5 ? [] : [{ objectId: "obj", x: rand() * 8, y: rand() * 8 }];
      const scan = composeScanLog(path, objects);
      expect(() => validateScanLines(scan.lines)).not.toThrow();
    }
  });

  it("rejects malformed scan logs", () => {
    expect(() => validateScanLines([])).toThrow();
    expect(() => validateScanLines(["{not json"])).toThrow(/not JSON/);
    expect(() =>
      validateScanLines([
        JSON.stringify({ type: "header", version: 1 }),
        JSON.stringify({ type: "trajectory", t_s: 1, x_m: 0, y_m: 0 }),
        JSON.stringify({ type: "trajectory", t_s: 0.5, x_m: 1, y_m: 0 }),
      ]),
    ).toThrow(/non-decreasing/);
    expect(() =>
      validateScanLines([
        JSON.stringify({ type: "header", version: 99 }),
        JSON.stringify({ type: "trajectory", t_s: 0, x_m: 0, y_m: 0 }),
        JSON.stringify({ type: "trajectory", t_s: 1, x_m: 1, y_m: 0 }),
      ]),
    ).toThrow(/version/);
    expect(() =>
      validateScanLines([JSON.stringify({ type: "mystery", t_s: 0 })]),
    ).toThrow(/unknown record/);
  });
});
