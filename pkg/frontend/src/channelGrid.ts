/** The channel status grid: one colored cell per channel, click for noise. */

import type { AvailabilityResponse } from "./api.js";
import { statusColor } from "./colors.js";

export function renderChannelGrid(container: HTMLElement, data: AvailabilityResponse): void {
  container.textContent = "";

  const grid = document.createElement("div");
  grid.className = "channel-grid";
  const detail = document.createElement("div");
  detail.className = "grid-detail";
  detail.textContent = "click a channel to see its noise level";

  const channels = Object.keys(data.statuses)
    .map(Number)
    .sort((a, b) => a - b);
  for (const channel of channels) {
    const cell = document.createElement("button");
    const color = statusColor(data.statuses[String(channel)]);
    cell.className = `channel-cell ${color}`;
    cell.dataset.channel = String(channel);
    cell.textContent = String(channel);
    cell.addEventListener("click", () => {
      const noise = data.noise_dbm?.[String(channel)];
      detail.textContent =
        noise === undefined
          ? `channel ${channel}: no noise data`
          : `channel ${channel} noise: ${noise.toFixed(2)} dBm`;
      detail.dataset.channel = String(channel);
    });
    grid.appendChild(cell);
  }

  const totals = document.createElement("div");
  totals.className = "grid-totals";
  totals.textContent = data.matched
    ? `${data.totals.available_usable} available & usable / ` +
      `${data.totals.available} available / ${data.totals.scanned} scanned`
    : "no status for this location (outside the scanned region)";

  container.appendChild(grid);
  container.appendChild(detail);
  container.appendChild(totals);
}
