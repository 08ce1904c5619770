/** Application entry: tab shell wiring the three views to the service. */

import { setBaseUrl } from "./config.js";
import { createLocationSearch } from "./locationSearch.js";
import { createPlanner } from "./planner.js";
import { createScanConsole } from "./scanConsole.js";

function mount(): void {
  const baseInput = document.getElementById("base-url") as HTMLInputElement | null;
  if (baseInput) {
    setBaseUrl(baseInput.value);
    baseInput.addEventListener("change", () => setBaseUrl(baseInput.value));
  }

  const scanHost = document.getElementById("view-scan");
  const searchHost = document.getElementById("view-search");
  const plannerHost = document.getElementById("view-planner");
  if (!scanHost || !searchHost || !plannerHost) return;

  createScanConsole(scanHost);
  createLocationSearch(searchHost);
  createPlanner(plannerHost);

  const tabs = Array.from(document.querySelectorAll<HTMLButtonElement>("nav button[data-view]"));
  const views: Record<string, HTMLElement> = {
    scan: scanHost,
    search: searchHost,
    planner: plannerHost,
  };
  function show(name: string): void {
    for (const [key, view] of Object.entries(views)) {
      view.classList.toggle("hidden", key !== name);
    }
    for (const tab of tabs) {
      tab.classList.toggle("active", tab.dataset.view === name);
    }
  }
  for (const tab of tabs) {
    tab.addEventListener("click", () => show(tab.dataset.view ?? "scan"));
  }
  show("scan");
}

document.addEventListener("DOMContentLoaded", mount);
