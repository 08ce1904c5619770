/** Lightweight map: OSM raster tiles underneath an SVG vector overlay for
 * towers, scan pixels, link endpoints, and antenna bearing arrows.
 *
 * Projection helpers are pure and exported for tests; tile fetching is
 * best-effort and never blocks the overlay.
 */

export interface MapView {
  centerLat: number;
  centerLon: number;
  /** degrees of latitude spanned by the viewport height */
  latSpan: number;
  widthPx: number;
  heightPx: number;
}

export interface PointPx {
  x: number;
  y: number;
}

/** Equirectangular projection around the view center (lon scaled by cos lat). */
export function project(lat: number, lon: number, view: MapView): PointPx {
  const pxPerDegLat = view.heightPx / view.latSpan;
  const cos = Math.cos((view.centerLat * Math.PI) / 180);
  const x = view.widthPx / 2 + (lon - view.centerLon) * cos * pxPerDegLat;
  const y = view.heightPx / 2 - (lat - view.centerLat) * pxPerDegLat;
  return { x, y };
}

/** End point of a bearing arrow: compass azimuth, screen coordinates (y down). */
export function bearingLineEnd(origin: PointPx, azimuthDeg: number, lengthPx: number): PointPx {
  const rad = (azimuthDeg * Math.PI) / 180;
  return {
    x: origin.x + lengthPx * Math.sin(rad),
    y: origin.y - lengthPx * Math.cos(rad),
  };
}

export interface LinkDrawing {
  bs: { lat: number; lon: number; azimuthDeg?: number };
  ue: { lat: number; lon: number; azimuthDeg?: number };
  los: boolean;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgLine(a: PointPx, b: PointPx, className: string): SVGLineElement {
  const line = document.createElementNS(SVG_NS, "line");
  line.setAttribute("x1", String(a.x));
  line.setAttribute("y1", String(a.y));
  line.setAttribute("x2", String(b.x));
  line.setAttribute("y2", String(b.y));
  line.setAttribute("class", className);
  return line;
}

function svgCircle(p: PointPx, r: number, className: string): SVGCircleElement {
  const c = document.createElementNS(SVG_NS, "circle");
  c.setAttribute("cx", String(p.x));
  c.setAttribute("cy", String(p.y));
  c.setAttribute("r", String(r));
  c.setAttribute("class", className);
  return c;
}

export function renderLinkOverlay(svg: SVGSVGElement, view: MapView, link: LinkDrawing): void {
  svg.textContent = "";
  const bs = project(link.bs.lat, link.bs.lon, view);
  const ue = project(link.ue.lat, link.ue.lon, view);
  svg.appendChild(svgLine(bs, ue, link.los ? "link los" : "link nlos"));
  if (link.bs.azimuthDeg !== undefined) {
    svg.appendChild(svgLine(bs, bearingLineEnd(bs, link.bs.azimuthDeg, 28), "bearing"));
  }
  if (link.ue.azimuthDeg !== undefined) {
    svg.appendChild(svgLine(ue, bearingLineEnd(ue, link.ue.azimuthDeg, 28), "bearing"));
  }
  svg.appendChild(svgCircle(bs, 6, "marker bs"));
  svg.appendChild(svgCircle(ue, 5, "marker ue"));
}

export function renderTowerOverlay(
  svg: SVGSVGElement,
  view: MapView,
  towers: Array<{ lat: number; lon: number }>,
): void {
  for (const tower of towers) {
    svg.appendChild(svgCircle(project(tower.lat, tower.lon, view), 4, "marker tower"));
  }
}

/** Tile layer: fills the container with OSM tiles for the view; failures are
 * silent so the vector overlay still renders without network access. */
export function renderTileLayer(container: HTMLElement, view: MapView, zoom = 9): void {
  container.textContent = "";
  const n = 2 ** zoom;
  const xTile = ((view.centerLon + 180) / 360) * n;
  const latRad = (view.centerLat * Math.PI) / 180;
  const yTile = ((1 - Math.log(Math.tan(latRad) + 1 / Math.cos(latRad)) / Math.PI) / 2) * n;
  for (let dx = -1; dx <= 1; dx++) {
    for (let dy = -1; dy <= 1; dy++) {
      const img = document.createElement("img");
      img.className = "map-tile";
      img.style.left = `${view.widthPx / 2 + (Math.floor(xTile) + dx - xTile) * 256}px`;
      img.style.top = `${view.heightPx / 2 + (Math.floor(yTile) + dy - yTile) * 256}px`;
      img.src = `https://tile.openstreetmap.org/${zoom}/${(Math.floor(xTile) + dx + n) % n}/${Math.floor(yTile) + dy}.png`;
      img.addEventListener("error", () => img.remove());
      container.appendChild(img);
    }
  }
}
