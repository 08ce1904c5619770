/** Location search: lat/lon (+ optional max-noise override) -> channel grid. */

import { api, ApiError } from "./api.js";
import { renderChannelGrid } from "./channelGrid.js";
import { Field, numberField, numberValue, textField } from "./forms.js";
import { validateLat, validateLon } from "./validation.js";

export interface LocationSearch {
  root: HTMLElement;
  search(): Promise<void>;
}

export function createLocationSearch(container: HTMLElement): LocationSearch {
  const root = document.createElement("div");
  root.className = "location-search";
  container.appendChild(root);

  const lat = numberField("Lat", "lat", 24.7);
  const lon = numberField("Lon", "lon", 46.7);
  const maxNoise = textField("Max noise (dBm, blank = scan default)", "max_noise", "");
  const button = document.createElement("button");
  button.textContent = "Search";
  const errorLine = document.createElement("div");
  errorLine.className = "search-error";
  const gridHost = document.createElement("div");
  gridHost.className = "grid-host";
  root.append(lat.root, lon.root, maxNoise.root, button, errorLine, gridHost);

  function validate(): boolean {
    const errors = {
      lat: validateLat(numberValue(lat)),
      lon: validateLon(numberValue(lon)),
    };
    lat.setError(errors.lat);
    lon.setError(errors.lon);
    const ok = errors.lat === null && errors.lon === null;
    button.disabled = !ok;
    return ok;
  }
  for (const field of [lat, lon] satisfies Field[]) {
    field.input.addEventListener("input", validate);
  }

  async function search(): Promise<void> {
    if (!validate()) return;
    errorLine.textContent = "";
    const noiseRaw = (maxNoise.input as HTMLInputElement).value.trim();
    try {
      const result = await api.availability(
        numberValue(lat),
        numberValue(lon),
        noiseRaw === "" ? undefined : Number(noiseRaw),
      );
      renderChannelGrid(gridHost, result);
    } catch (err) {
      errorLine.textContent =
        err instanceof ApiError ? err.message : "service unreachable";
      throw err;
    }
  }

  button.addEventListener("click", () => void search().catch(() => undefined));
  validate();

  return { root, search };
}
