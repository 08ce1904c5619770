/** Client-side field validators mirroring the service's invariants.
 * Each returns null when valid, else a short message for inline display. */

export type FieldError = string | null;

export function validateLat(v: number): FieldError {
  if (!Number.isFinite(v) || v < -90 || v > 90) return "latitude must be in [-90, 90]";
  return null;
}

export function validateLon(v: number): FieldError {
  if (!Number.isFinite(v) || v < -180 || v >= 180) return "longitude must be in [-180, 180)";
  return null;
}

export function validatePositive(name: string) {
  return (v: number): FieldError =>
    !Number.isFinite(v) || v <= 0 ? `${name} must be > 0` : null;
}

export function validateNonNegative(name: string) {
  return (v: number): FieldError =>
    !Number.isFinite(v) || v < 0 ? `${name} must be >= 0` : null;
}

export const validatePixelSize = validatePositive("pixel size");
export const validateRadius = validatePositive("radius");
export const validateFrequency = validatePositive("frequency");
export const validateBandwidth = validatePositive("bandwidth");
export const validateBeamwidth = validatePositive("beamwidth");
export const validateSla = validatePositive("side-lobe attenuation");
export const validateSpacing = validatePositive("element spacing");
export const validateHeight = validateNonNegative("height");
export const validateCableLoss = validateNonNegative("cable loss");
export const validateNoiseFigure = validateNonNegative("noise figure");
export const validateSeparation = validateNonNegative("separation distance");

export function validateTilt(v: number): FieldError {
  if (!Number.isFinite(v) || v < -90 || v > 90) return "tilt must be in [-90, 90]";
  return null;
}

export function validateAzimuth(v: number): FieldError {
  if (!Number.isFinite(v) || v < -180 || v > 180) return "azimuth must be in [-180, 180]";
  return null;
}

export function validateArraySize(v: number): FieldError {
  if (!Number.isInteger(v) || v < 1) return "array size must be an integer >= 1";
  return null;
}

export function validateRadials(v: number): FieldError {
  if (!Number.isInteger(v) || v < 4) return "radials must be an integer >= 4";
  return null;
}

export function validateChannelRange(first: number, last: number): FieldError {
  if (!Number.isInteger(first) || !Number.isInteger(last)) return "channels must be integers";
  if (first > last) return "first channel must be <= last channel";
  return null;
}

export function validateBandwidthMhz(v: number): FieldError {
  return v === 6 || v === 7 || v === 8 ? null : "channel bandwidth must be 6, 7, or 8 MHz";
}

export function validateReserved(list: number[]): FieldError {
  if (list.some((c) => !Number.isInteger(c))) return "reserved channels must be integers";
  if (new Set(list).size > 12) return "at most 12 reserved channels";
  return null;
}

/** Parse a comma-separated integer list; returns null on malformed input. */
export function parseIntList(text: string): number[] | null {
  const trimmed = text.trim();
  if (!trimmed) return [];
  const parts = trimmed.split(",").map((p) => Number(p.trim()));
  if (parts.some((p) => !Number.isInteger(p))) return null;
  return parts;
}

/** True when no entry of the error map is set; gates the submit buttons. */
export function allValid(errors: Record<string, FieldError>): boolean {
  return Object.values(errors).every((e) => e === null);
}
