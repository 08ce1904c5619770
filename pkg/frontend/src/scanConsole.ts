/** Scan console: upload towers, edit the scan configuration, run a scan job,
 * watch its progress, and load a result summary when it finishes. */

import { api, ApiError } from "./api.js";
import {
  checkboxField,
  Field,
  fieldset,
  numberField,
  numberValue,
  selectField,
  textField,
} from "./forms.js";
import {
  allValid,
  parseIntList,
  validateBandwidthMhz,
  validateChannelRange,
  validateHeight,
  validateLat,
  validateLon,
  validatePixelSize,
  validatePositive,
  validateRadials,
  validateRadius,
  validateReserved,
  validateSeparation,
} from "./validation.js";

export interface ScanConsoleOptions {
  /** Job poll interval; the UI default is 1 s. */
  pollIntervalMs?: number;
}

export interface ScanConsole {
  root: HTMLElement;
  serialize(): Record<string, unknown>;
  validate(): boolean;
  uploadTowers(): Promise<void>;
  run(): Promise<void>;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export function createScanConsole(
  container: HTMLElement,
  options: ScanConsoleOptions = {},
): ScanConsole {
  const pollInterval = options.pollIntervalMs ?? 1000;

  const root = document.createElement("div");
  root.className = "scan-console";
  container.appendChild(root);

  const banner = document.createElement("div");
  banner.className = "banner hidden";
  const bannerText = document.createElement("span");
  const retry = document.createElement("button");
  retry.textContent = "retry";
  banner.append(bannerText, retry);
  root.appendChild(banner);

  // -- towers upload ---------------------------------------------------------
  const towersInput = document.createElement("textarea");
  towersInput.className = "towers-input";
  towersInput.placeholder = "paste the tower dataset CSV here";
  const uploadButton = document.createElement("button");
  uploadButton.textContent = "Upload towers";
  const towersStatus = document.createElement("div");
  towersStatus.className = "towers-status";
  root.appendChild(fieldset("TV towers", towersInput, uploadButton, towersStatus));

  // -- config form -----------------------------------------------------------
  const f = {
    centerLat: numberField("Region center lat", "center_lat", 24.7),
    centerLon: numberField("Region center lon", "center_lon", 46.7),
    radius: numberField("Region radius (km)", "radius_km", 18),
    pixel: numberField("Pixel size (km)", "pixel_size_km", 2),
    band: selectField("Band", "band", ["low_vhf", "high_vhf", "uhf"], "uhf"),
    firstCh: numberField("First channel", "first_channel", 21, "1"),
    lastCh: numberField("Last channel", "last_channel", 30, "1"),
    firstCenter: numberField("First center (MHz)", "first_center_mhz", 515),
    bandwidth: selectField("Bandwidth (MHz)", "bandwidth_mhz", ["6", "7", "8"], "6"),
    scanFirst: numberField("Scan from channel", "scan_first", 22, "1"),
    scanLast: numberField("Scan to channel", "scan_last", 27, "1"),
    reserved: textField("Reserved channels", "reserved", "24"),
    thA: numberField("Threshold analog (dBm)", "th_a", -64),
    thD: numberField("Threshold digital (dBm)", "th_d", -84),
    sepCo: numberField("Separation co-channel (km)", "sep_co_km", 6),
    sepAdj: numberField("Separation adjacent (km)", "sep_adj_km", 2),
    wsdHeight: numberField("WSD height (m)", "wsd_height_m", 10),
    wsdGain: numberField("WSD gain (dBi)", "wsd_gain_dbi", 0),
    rxHeight: numberField("TV receiver height (m)", "tv_rx_height_m", 10),
    rxGain: numberField("TV receiver gain (dBi)", "tv_rx_gain_dbi", 0),
    model: selectField("Propagation model", "model", ["free_space", "terrain"], "free_space"),
    terrain: textField("Terrain file (server-side .asc)", "terrain", ""),
    maxRange: numberField("Max range (km)", "max_range_km", 60),
    resolution: textField("Resolution (m or 'auto')", "resolution_m", "auto"),
    radials: numberField("Contour radials", "radials", 36, "1"),
    computeNoise: checkboxField("Compute channel noise", "compute_noise", true),
    maxNoise: numberField("Max noise (dBm)", "max_noise_dbm", -85),
  } satisfies Record<string, Field>;

  root.appendChild(
    fieldset(
      "Region & grid",
      f.centerLat.root,
      f.centerLon.root,
      f.radius.root,
      f.pixel.root,
    ),
  );
  root.appendChild(
    fieldset(
      "Channel plan",
      f.band.root,
      f.firstCh.root,
      f.lastCh.root,
      f.firstCenter.root,
      f.bandwidth.root,
      f.scanFirst.root,
      f.scanLast.root,
      f.reserved.root,
    ),
  );
  root.appendChild(
    fieldset(
      "Protection",
      f.thA.root,
      f.thD.root,
      f.sepCo.root,
      f.sepAdj.root,
      f.wsdHeight.root,
      f.wsdGain.root,
      f.rxHeight.root,
      f.rxGain.root,
    ),
  );
  root.appendChild(
    fieldset(
      "Model",
      f.model.root,
      f.terrain.root,
      f.maxRange.root,
      f.resolution.root,
      f.radials.root,
      f.computeNoise.root,
      f.maxNoise.root,
    ),
  );

  const runButton = document.createElement("button");
  runButton.textContent = "Run scan";
  runButton.className = "run-scan";
  const progressOuter = document.createElement("div");
  progressOuter.className = "progress";
  const progressBar = document.createElement("div");
  progressBar.className = "progress-bar";
  progressOuter.appendChild(progressBar);
  const statusLine = document.createElement("div");
  statusLine.className = "scan-status";
  const errorLine = document.createElement("div");
  errorLine.className = "scan-error";
  const summary = document.createElement("div");
  summary.className = "scan-summary";
  root.append(runButton, progressOuter, statusLine, errorLine, summary);

  function showBanner(message: string): void {
    bannerText.textContent = message;
    banner.classList.remove("hidden");
  }

  function hideBanner(): void {
    banner.classList.add("hidden");
  }

  function validate(): boolean {
    const reservedList = parseIntList((f.reserved.input as HTMLInputElement).value);
    const errors = {
      centerLat: validateLat(numberValue(f.centerLat)),
      centerLon: validateLon(numberValue(f.centerLon)),
      radius: validateRadius(numberValue(f.radius)),
      pixel: validatePixelSize(numberValue(f.pixel)),
      plan: validateChannelRange(numberValue(f.firstCh), numberValue(f.lastCh)),
      scanRange: validateChannelRange(numberValue(f.scanFirst), numberValue(f.scanLast)),
      firstCenter: validatePositive("center frequency")(numberValue(f.firstCenter)),
      bandwidth: validateBandwidthMhz(Number(f.bandwidth.input.value)),
      reserved: reservedList === null ? "reserved must be a comma-separated integer list" : validateReserved(reservedList),
      sepCo: validateSeparation(numberValue(f.sepCo)),
      sepAdj: validateSeparation(numberValue(f.sepAdj)),
      wsdHeight: validateHeight(numberValue(f.wsdHeight)),
      rxHeight: validateHeight(numberValue(f.rxHeight)),
      maxRange: validatePositive("max range")(numberValue(f.maxRange)),
      radials: validateRadials(numberValue(f.radials)),
      resolution:
        (f.resolution.input as HTMLInputElement).value.trim() === "auto" ||
        Number((f.resolution.input as HTMLInputElement).value) > 0
          ? null
          : "resolution must be 'auto' or a positive number of meters",
    };
    f.centerLat.setError(errors.centerLat);
    f.centerLon.setError(errors.centerLon);
    f.radius.setError(errors.radius);
    f.pixel.setError(errors.pixel);
    f.firstCh.setError(errors.plan);
    f.scanFirst.setError(errors.scanRange);
    f.firstCenter.setError(errors.firstCenter);
    f.bandwidth.setError(errors.bandwidth);
    f.reserved.setError(errors.reserved);
    f.sepCo.setError(errors.sepCo);
    f.sepAdj.setError(errors.sepAdj);
    f.wsdHeight.setError(errors.wsdHeight);
    f.rxHeight.setError(errors.rxHeight);
    f.maxRange.setError(errors.maxRange);
    f.radials.setError(errors.radials);
    f.resolution.setError(errors.resolution);
    const ok = allValid(errors);
    runButton.disabled = !ok;
    return ok;
  }

  for (const field of Object.values(f)) {
    field.input.addEventListener("input", validate);
    field.input.addEventListener("change", validate);
  }

  function serialize(): Record<string, unknown> {
    const channels: number[] = [];
    for (let n = numberValue(f.scanFirst); n <= numberValue(f.scanLast); n++) channels.push(n);
    const resolutionRaw = (f.resolution.input as HTMLInputElement).value.trim();
    const doc: Record<string, unknown> = {
      boundary: {
        variant: "circle",
        center: { lat: numberValue(f.centerLat), lon: numberValue(f.centerLon) },
        radius_km: numberValue(f.radius),
      },
      pixel_size_km: numberValue(f.pixel),
      channel_plan: {
        bandwidth_mhz: Number(f.bandwidth.input.value),
        segments: [
          {
            band: f.band.input.value,
            first_channel: numberValue(f.firstCh),
            last_channel: numberValue(f.lastCh),
            first_center_mhz: numberValue(f.firstCenter),
          },
        ],
      },
      channels,
      reserved: parseIntList((f.reserved.input as HTMLInputElement).value) ?? [],
      thresholds_dbm: {
        [f.band.input.value]: { a: numberValue(f.thA), d: numberValue(f.thD) },
      },
      sep_co_km: numberValue(f.sepCo),
      sep_adj_km: numberValue(f.sepAdj),
      wsd_height_m: numberValue(f.wsdHeight),
      wsd_gain_dbi: numberValue(f.wsdGain),
      tv_rx_height_m: numberValue(f.rxHeight),
      tv_rx_gain_dbi: numberValue(f.rxGain),
      model: f.model.input.value,
      params: {
        max_range_km: numberValue(f.maxRange),
        resolution_m: resolutionRaw === "auto" ? "auto" : Number(resolutionRaw),
      },
      radials: numberValue(f.radials),
      compute_noise: (f.computeNoise.input as HTMLInputElement).checked,
      max_noise_dbm: numberValue(f.maxNoise),
    };
    const terrain = (f.terrain.input as HTMLInputElement).value.trim();
    if (terrain) doc.terrain = terrain;
    return doc;
  }

  async function uploadTowers(): Promise<void> {
    hideBanner();
    towersStatus.textContent = "";
    try {
      const result = await api.uploadTowers(towersInput.value);
      const issues = result.diagnostics.map((d) => `row ${d.row}: ${d.field}: ${d.message}`);
      towersStatus.textContent =
        `${result.loaded} towers loaded` + (issues.length ? `; ${issues.join("; ")}` : "");
    } catch (err) {
      handleError(err);
      throw err;
    }
  }

  function handleError(err: unknown): void {
    if (err instanceof ApiError) {
      errorLine.textContent = err.field ? `${err.field}: ${err.message}` : err.message;
    } else {
      showBanner("service unreachable");
    }
  }

  async function run(): Promise<void> {
    if (!validate()) return;
    hideBanner();
    errorLine.textContent = "";
    summary.textContent = "";
    progressBar.style.width = "0%";
    statusLine.textContent = "submitting...";
    try {
      const job = await api.submitScan(serialize());
      statusLine.textContent = `job ${job.id}: ${job.state}`;
      let current = job;
      while (current.state === "pending" || current.state === "running") {
        await sleep(pollInterval);
        current = await api.jobStatus(job.id);
        progressBar.style.width = `${Math.round(current.progress * 100)}%`;
        statusLine.textContent = `job ${job.id}: ${current.state} (${Math.round(current.progress * 100)}%)`;
      }
      if (current.state === "failed") {
        errorLine.textContent = current.error ?? "scan failed";
        return;
      }
      progressBar.style.width = "100%";
      const csv = await api.resultCsv(job.id);
      const lines = csv.split("\n").filter((l) => l.length > 0);
      const channelCount = (lines[0] ?? "").split(",").filter((h) => h.startsWith("ch_")).length;
      summary.textContent = `scan complete: ${lines.length - 1} pixels, ${channelCount} channels`;
    } catch (err) {
      handleError(err);
      throw err;
    }
  }

  uploadButton.addEventListener("click", () => void uploadTowers().catch(() => undefined));
  runButton.addEventListener("click", () => void run().catch(() => undefined));
  retry.addEventListener("click", () => void run().catch(() => undefined));
  validate();

  return { root, serialize, validate, uploadTowers, run };
}
