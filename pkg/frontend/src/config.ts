/** Single client setting: where the spectrum service lives. */

let serviceBaseUrl = "";

export function setBaseUrl(url: string): void {
  serviceBaseUrl = url.replace(/\/+$/, "");
}

export function baseUrl(): string {
  return serviceBaseUrl;
}
