/** Contract tests: the forms must serialize to exactly the field names the
 * service accepted when the fixture was recorded — no silent mismatches. */

import { beforeEach, describe, expect, it } from "vitest";

import { createPlanner } from "../src/planner.js";
import { createScanConsole } from "../src/scanConsole.js";
import fixtures from "./fixtures/engine.json";

function keyPaths(value: unknown, prefix = ""): string[] {
  if (Array.isArray(value)) {
    // Array element schemas are uniform; index 0 stands for all.
    return value.length ? keyPaths(value[0], `${prefix}[]`) : [`${prefix}[]`];
  }
  if (value !== null && typeof value === "object") {
    const out: string[] = [];
    for (const [key, child] of Object.entries(value as Record<string, unknown>)) {
      out.push(...keyPaths(child, prefix ? `${prefix}.${key}` : key));
    }
    return out;
  }
  return [prefix];
}

describe("form serialization matches the recorded service schema", () => {
  beforeEach(() => {
    document.body.innerHTML = "<div id='host'></div>";
  });

  it("scan config field names round-trip", () => {
    const console_ = createScanConsole(document.getElementById("host")!);
    const serialized = new Set(keyPaths(console_.serialize()));
    const accepted = keyPaths(fixtures.scan_config_accepted);
    for (const path of accepted) {
      expect(serialized, `missing field ${path}`).toContain(path);
    }
    // And nothing the service never saw.
    const acceptedSet = new Set(accepted);
    for (const path of serialized) {
      expect(acceptedSet, `unexpected field ${path}`).toContain(path);
    }
  });

  it("rf plan field names round-trip", () => {
    const planner = createPlanner(document.getElementById("host")!);
    const doc = planner.serialize() as Record<string, unknown>;
    doc.orientation_scan = {
      target: "bs",
      az_range: [-180, 180],
      el_range: [-90, 90],
      az_step: 5,
      el_step: 5,
    };
    const serialized = new Set(keyPaths(doc));
    const accepted = keyPaths(fixtures.plan_accepted);
    for (const path of accepted) {
      // The isotropic UE fixture antenna carries only `type`.
      if (path === "ue.antenna.type") continue;
      expect(serialized, `missing field ${path}`).toContain(path);
    }
    const acceptedSet = new Set([...accepted, "ue.antenna.type"]);
    for (const path of serialized) {
      expect(acceptedSet, `unexpected field ${path}`).toContain(path);
    }
  });

  it("planner defaults are valid and enable submission", () => {
    const planner = createPlanner(document.getElementById("host")!);
    expect(planner.validate()).toBe(true);
  });

  it("invalid field disables submission until fixed", () => {
    const planner = createPlanner(document.getElementById("host")!);
    (planner.bsFields.lat.input as HTMLInputElement).value = "95";
    expect(planner.validate()).toBe(false);
    const runButton = document.querySelector<HTMLButtonElement>(".run-plan")!;
    expect(runButton.disabled).toBe(true);
    (planner.bsFields.lat.input as HTMLInputElement).value = "24.7";
    expect(planner.validate()).toBe(true);
    expect(runButton.disabled).toBe(false);
  });
});
