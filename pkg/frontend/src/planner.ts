/** RF planner: PtP/PtMP link evaluation and antenna-orientation optimization.
 *
 * Run posts the form to /api/rfplan and displays the returned metrics
 * verbatim; Scan posts to /api/optimize and writes the returned azimuth and
 * elevation back into the antenna form fields, closing the steering loop.
 */

import { api, ApiError, LinkMetrics, RfPlanResponse } from "./api.js";
import {
  checkboxField,
  Field,
  fieldset,
  numberField,
  numberValue,
  selectField,
  textField,
} from "./forms.js";
import { MapView, renderLinkOverlay } from "./map.js";
import {
  allValid,
  validateArraySize,
  validateAzimuth,
  validateBandwidth,
  validateBeamwidth,
  validateCableLoss,
  validateFrequency,
  validateHeight,
  validateLat,
  validateLon,
  validateNoiseFigure,
  validateSla,
  validateSpacing,
  validateTilt,
} from "./validation.js";

interface EndpointFields {
  lat: Field;
  lon: Field;
  height: Field;
  power: Field;
  cable: Field;
  sensitivity: Field;
  noiseFigure: Field;
  directional: Field;
  tilt: Field;
  azimuth: Field;
  hBw: Field;
  vBw: Field;
  sla: Field;
  spacing: Field;
  rows: Field;
  cols: Field;
}

function endpointFieldset(
  legend: string,
  prefix: string,
  defaults: { lat: number; lon: number; height: number; power: number; directional: boolean },
): { set: HTMLFieldSetElement; fields: EndpointFields } {
  const fields: EndpointFields = {
    lat: numberField("Lat", `${prefix}_lat`, defaults.lat),
    lon: numberField("Lon", `${prefix}_lon`, defaults.lon),
    height: numberField("Antenna height (m)", `${prefix}_height_agl_m`, defaults.height),
    power: numberField("Tx power (dBm)", `${prefix}_tx_power_dbm`, defaults.power),
    cable: numberField("Cable loss (dB)", `${prefix}_cable_loss_db`, 0),
    sensitivity: numberField("Sensitivity (dBm)", `${prefix}_sensitivity_dbm`, -90),
    noiseFigure: numberField("Noise figure (dB)", `${prefix}_noise_figure_db`, 6),
    directional: checkboxField("Directional antenna (URA)", `${prefix}_directional`, defaults.directional),
    tilt: numberField("Tilt (deg)", `${prefix}_tilt_deg`, 0),
    azimuth: numberField("Azimuth (deg)", `${prefix}_azimuth_deg`, 0),
    hBw: numberField("H beamwidth (deg)", `${prefix}_h_bw_deg`, 65),
    vBw: numberField("V beamwidth (deg)", `${prefix}_v_bw_deg`, 65),
    sla: numberField("SLA (dB)", `${prefix}_sla_db`, 30),
    spacing: numberField("Element spacing (wavelengths)", `${prefix}_spacing`, 0.5),
    rows: numberField("Array rows", `${prefix}_rows`, 1, "1"),
    cols: numberField("Array cols", `${prefix}_cols`, 1, "1"),
  };
  const set = fieldset(
    legend,
    fields.lat.root,
    fields.lon.root,
    fields.height.root,
    fields.power.root,
    fields.cable.root,
    fields.sensitivity.root,
    fields.noiseFigure.root,
    fields.directional.root,
    fields.tilt.root,
    fields.azimuth.root,
    fields.hBw.root,
    fields.vBw.root,
    fields.sla.root,
    fields.spacing.root,
    fields.rows.root,
    fields.cols.root,
  );
  return { set, fields };
}

function endpointErrors(fields: EndpointFields): Record<string, string | null> {
  const directional = (fields.directional.input as HTMLInputElement).checked;
  const errors: Record<string, string | null> = {
    lat: validateLat(numberValue(fields.lat)),
    lon: validateLon(numberValue(fields.lon)),
    height: validateHeight(numberValue(fields.height)),
    cable: validateCableLoss(numberValue(fields.cable)),
    noiseFigure: validateNoiseFigure(numberValue(fields.noiseFigure)),
    tilt: directional ? validateTilt(numberValue(fields.tilt)) : null,
    azimuth: directional ? validateAzimuth(numberValue(fields.azimuth)) : null,
    hBw: directional ? validateBeamwidth(numberValue(fields.hBw)) : null,
    vBw: directional ? validateBeamwidth(numberValue(fields.vBw)) : null,
    sla: directional ? validateSla(numberValue(fields.sla)) : null,
    spacing: directional ? validateSpacing(numberValue(fields.spacing)) : null,
    rows: directional ? validateArraySize(numberValue(fields.rows)) : null,
    cols: directional ? validateArraySize(numberValue(fields.cols)) : null,
  };
  fields.lat.setError(errors.lat ?? null);
  fields.lon.setError(errors.lon ?? null);
  fields.height.setError(errors.height ?? null);
  fields.cable.setError(errors.cable ?? null);
  fields.noiseFigure.setError(errors.noiseFigure ?? null);
  fields.tilt.setError(errors.tilt ?? null);
  fields.azimuth.setError(errors.azimuth ?? null);
  fields.hBw.setError(errors.hBw ?? null);
  fields.vBw.setError(errors.vBw ?? null);
  fields.sla.setError(errors.sla ?? null);
  fields.spacing.setError(errors.spacing ?? null);
  fields.rows.setError(errors.rows ?? null);
  fields.cols.setError(errors.cols ?? null);
  return errors;
}

function serializeEndpoint(fields: EndpointFields): Record<string, unknown> {
  const doc: Record<string, unknown> = {
    location: { lat: numberValue(fields.lat), lon: numberValue(fields.lon) },
    height_agl_m: numberValue(fields.height),
    tx_power_dbm: numberValue(fields.power),
    cable_loss_db: numberValue(fields.cable),
    sensitivity_dbm: numberValue(fields.sensitivity),
    noise_figure_db: numberValue(fields.noiseFigure),
  };
  if ((fields.directional.input as HTMLInputElement).checked) {
    doc.antenna = {
      type: "ura",
      tilt_deg: numberValue(fields.tilt),
      azimuth_deg: numberValue(fields.azimuth),
      h_bw_deg: numberValue(fields.hBw),
      v_bw_deg: numberValue(fields.vBw),
      sla_db: numberValue(fields.sla),
      spacing_wavelengths: numberValue(fields.spacing),
      rows: numberValue(fields.rows),
      cols: numberValue(fields.cols),
    };
  } else {
    doc.antenna = { type: "isotropic" };
  }
  return doc;
}

const METRIC_LABELS: Array<[keyof LinkMetrics, string, string]> = [
  ["rss_dbm", "RSS", "dBm"],
  ["pathloss_db", "Pathloss", "dB"],
  ["snr_db", "SNR", "dB"],
  ["noise_power_dbm", "Noise power", "dBm"],
  ["capacity_mbps", "Capacity", "Mbps"],
  ["fade_margin_db", "Fade margin", "dB"],
  ["tx_dir_gain_dbi", "Tx dir. gain", "dBi"],
  ["rx_dir_gain_dbi", "Rx dir. gain", "dBi"],
];

export interface Planner {
  root: HTMLElement;
  serialize(): Record<string, unknown>;
  validate(): boolean;
  run(): Promise<RfPlanResponse>;
  optimize(target: "bs" | "ue" | "both"): Promise<void>;
  readonly bsFields: EndpointFields;
  readonly ueFields: EndpointFields;
  lastRss(): number | null;
}

export function createPlanner(container: HTMLElement): Planner {
  const root = document.createElement("div");
  root.className = "planner";
  container.appendChild(root);

  const scenario = selectField("Scenario", "scenario", ["ptp", "ptmp"], "ptp");
  const direction = selectField("Direction", "direction", ["downlink", "uplink"], "downlink");
  const frequency = numberField("Frequency (MHz)", "frequency_mhz", 539);
  const bandwidth = numberField("Bandwidth (Hz)", "bandwidth_hz", 6e6);
  const model = selectField("Model", "model", ["free_space", "terrain"], "free_space");
  const terrain = textField("Terrain file (server-side .asc)", "terrain", "");
  root.appendChild(
    fieldset("Link", scenario.root, direction.root, frequency.root, bandwidth.root, model.root, terrain.root),
  );

  const bs = endpointFieldset("Base station", "bs", {
    lat: 24.7,
    lon: 46.62,
    height: 30,
    power: 36,
    directional: true,
  });
  const ue = endpointFieldset("User device", "ue", {
    lat: 24.6,
    lon: 46.75,
    height: 10,
    power: 23,
    directional: false,
  });
  root.append(bs.set, ue.set);

  const extraUes = textField("Extra UE locations (PtMP; lat,lon per entry; ';' separated)", "extra_ues", "");
  root.appendChild(fieldset("PtMP", extraUes.root));

  const runButton = document.createElement("button");
  runButton.textContent = "Run";
  runButton.className = "run-plan";
  const optimizeTarget = selectField("Optimize target", "optimize_target", ["bs", "ue", "both"], "bs");
  const optimizeButton = document.createElement("button");
  optimizeButton.textContent = "Scan orientation";
  optimizeButton.className = "run-optimize";
  const errorLine = document.createElement("div");
  errorLine.className = "plan-error";
  const metricsHost = document.createElement("div");
  metricsHost.className = "metrics";
  const optimizeLine = document.createElement("div");
  optimizeLine.className = "optimize-result";

  const mapHost = document.createElement("div");
  mapHost.className = "map";
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "map-overlay");
  svg.setAttribute("width", "480");
  svg.setAttribute("height", "360");
  mapHost.appendChild(svg);

  root.append(runButton, optimizeTarget.root, optimizeButton, errorLine, metricsHost, optimizeLine, mapHost);

  let lastRssValue: number | null = null;

  function validate(): boolean {
    const errors = {
      frequency: validateFrequency(numberValue(frequency)),
      bandwidth: validateBandwidth(numberValue(bandwidth)),
      ...prefixKeys("bs_", endpointErrors(bs.fields)),
      ...prefixKeys("ue_", endpointErrors(ue.fields)),
    };
    frequency.setError(errors.frequency ?? null);
    bandwidth.setError(errors.bandwidth ?? null);
    const ok = allValid(errors);
    runButton.disabled = !ok;
    optimizeButton.disabled = !ok;
    return ok;
  }

  function prefixKeys(prefix: string, obj: Record<string, string | null>): Record<string, string | null> {
    const out: Record<string, string | null> = {};
    for (const [k, v] of Object.entries(obj)) out[prefix + k] = v;
    return out;
  }

  for (const field of [scenario, direction, frequency, bandwidth, model, ...Object.values(bs.fields), ...Object.values(ue.fields)]) {
    field.input.addEventListener("input", validate);
    field.input.addEventListener("change", validate);
  }

  function serialize(): Record<string, unknown> {
    const doc: Record<string, unknown> = {
      scenario: scenario.input.value,
      direction: direction.input.value,
      frequency_mhz: numberValue(frequency),
      bandwidth_hz: numberValue(bandwidth),
      model: model.input.value,
      bs: serializeEndpoint(bs.fields),
    };
    const primaryUe = serializeEndpoint(ue.fields);
    if (scenario.input.value === "ptp") {
      doc.ue = primaryUe;
    } else {
      const extras = (extraUes.input as HTMLInputElement).value
        .split(";")
        .map((entry) => entry.trim())
        .filter((entry) => entry.length > 0)
        .map((entry) => {
          const [latRaw, lonRaw] = entry.split(",");
          return {
            ...primaryUe,
            location: { lat: Number(latRaw), lon: Number(lonRaw) },
          };
        });
      doc.ues = [primaryUe, ...extras];
    }
    const terrainPath = (terrain.input as HTMLInputElement).value.trim();
    if (terrainPath) doc.terrain = terrainPath;
    return doc;
  }

  function renderMetrics(response: RfPlanResponse): void {
    metricsHost.textContent = "";
    response.links.forEach((link, i) => {
      const card = document.createElement("dl");
      card.className = "metric-card";
      if (response.links.length > 1) {
        const head = document.createElement("dt");
        head.textContent = `UE ${i + 1}`;
        card.appendChild(head);
      }
      for (const [key, label, unit] of METRIC_LABELS) {
        const dt = document.createElement("dt");
        dt.textContent = label;
        const dd = document.createElement("dd");
        dd.dataset.metric = key;
        dd.textContent = `${(link[key] as number).toFixed(2)} ${unit}`;
        card.append(dt, dd);
      }
      const dt = document.createElement("dt");
      dt.textContent = "LOS";
      const dd = document.createElement("dd");
      dd.dataset.metric = "los";
      dd.textContent = link.los ? "LOS" : "NLOS";
      card.append(dt, dd);
      metricsHost.appendChild(card);
    });
  }

  function renderMap(los: boolean): void {
    const bsLat = numberValue(bs.fields.lat);
    const bsLon = numberValue(bs.fields.lon);
    const ueLat = numberValue(ue.fields.lat);
    const ueLon = numberValue(ue.fields.lon);
    const view: MapView = {
      centerLat: (bsLat + ueLat) / 2,
      centerLon: (bsLon + ueLon) / 2,
      latSpan: Math.max(Math.abs(bsLat - ueLat) * 2.5, 0.05),
      widthPx: 480,
      heightPx: 360,
    };
    renderLinkOverlay(svg, view, {
      bs: {
        lat: bsLat,
        lon: bsLon,
        azimuthDeg: (bs.fields.directional.input as HTMLInputElement).checked
          ? numberValue(bs.fields.azimuth)
          : undefined,
      },
      ue: {
        lat: ueLat,
        lon: ueLon,
        azimuthDeg: (ue.fields.directional.input as HTMLInputElement).checked
          ? numberValue(ue.fields.azimuth)
          : undefined,
      },
      los,
    });
  }

  async function run(): Promise<RfPlanResponse> {
    errorLine.textContent = "";
    try {
      const response = await api.rfplan(serialize());
      renderMetrics(response);
      const first = response.links[0];
      lastRssValue = first ? first.rss_dbm : null;
      renderMap(first ? first.los : true);
      return response;
    } catch (err) {
      errorLine.textContent = err instanceof ApiError ? err.message : "service unreachable";
      throw err;
    }
  }

  async function optimize(target: "bs" | "ue" | "both"): Promise<void> {
    errorLine.textContent = "";
    const doc = serialize();
    doc.orientation_scan = {
      target,
      az_range: [-180, 180],
      el_range: [-90, 90],
      az_step: 5,
      el_step: 5,
    };
    try {
      const result = await api.optimize(doc);
      if (result.bs) {
        (bs.fields.azimuth.input as HTMLInputElement).value = String(result.bs.azimuth_deg);
        (bs.fields.tilt.input as HTMLInputElement).value = String(result.bs.elevation_deg);
      }
      if (result.ue) {
        (ue.fields.azimuth.input as HTMLInputElement).value = String(result.ue.azimuth_deg);
        (ue.fields.tilt.input as HTMLInputElement).value = String(result.ue.elevation_deg);
      }
      optimizeLine.textContent = `optimum written to the form; predicted RSS ${result.rss_dbm.toFixed(2)} dBm`;
    } catch (err) {
      errorLine.textContent = err instanceof ApiError ? err.message : "service unreachable";
      throw err;
    }
  }

  runButton.addEventListener("click", () => void run().catch(() => undefined));
  optimizeButton.addEventListener("click", () =>
    void optimize(optimizeTarget.input.value as "bs" | "ue" | "both").catch(() => undefined),
  );
  validate();

  return {
    root,
    serialize,
    validate,
    run,
    optimize,
    bsFields: bs.fields,
    ueFields: ue.fields,
    lastRss: () => lastRssValue,
  };
}
