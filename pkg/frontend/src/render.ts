/** Figure renderer: builds a backend-neutral scene (lines, rects, texts)
 * from the extracted series, then emits it as an SVG string and as a PNG
 * raster.  Both backends consume identical geometry, and nothing here
 * recomputes model math; values pass through axis scaling only. */

import { FIGURES, extractSeries, type FigureId, type FigureSpec, type Series } from "./figures.js";
import { encodePng } from "./png.js";
import { GLYPH_HEIGHT, Raster, textWidth, type Rgb } from "./raster.js";
import { formatTick, makeScale, type Scale, type ScaleKind } from "./scale.js";

export const WIDTH = 820;
export const HEIGHT = 500;
const MARGIN = { left: 74, right: 200, top: 36, bottom: 56 } as const;

export const PALETTE: Rgb[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
  [188, 189, 34],
  [23, 190, 207],
];

const GRID: Rgb = [224, 224, 224];
const AXIS: Rgb = [0, 0, 0];
const TEXT: Rgb = [30, 30, 30];

interface SceneLine {
  xs: number[];
  ys: number[];
  color: Rgb;
  width: number;
}

interface SceneText {
  x: number;
  y: number; // top of the glyph box
  text: string;
  color: Rgb;
  anchor: "start" | "middle" | "end";
}

interface Scene {
  lines: SceneLine[];
  texts: SceneText[];
}

export interface RenderOptions {
  xScale?: ScaleKind;
  yScale?: ScaleKind;
}

export interface Rendered {
  svg: string;
  png: Buffer;
}

function extent(values: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const block of values) {
    for (const v of block) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  return [lo, hi];
}

function padDomain(domain: [number, number], kind: ScaleKind): [number, number] {
  let [lo, hi] = domain;
  if (kind === "log") {
    return [lo / 1.2, hi * 1.2];
  }
  if (lo === hi) {
    return [lo - 1, hi + 1];
  }
  const pad = 0.05 * (hi - lo);
  // anchor at zero when the data nearly reaches it (margins, sigmas)
  if (lo > 0 && lo < 0.25 * hi) {
    lo = 0;
  } else {
    lo -= pad;
  }
  return [lo, hi + pad];
}

/** Drop points a log axis cannot place (non-positive values). */
function usableOnScales(series: Series, xKind: ScaleKind, yKind: ScaleKind): Series {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < series.x.length; i++) {
    if (xKind === "log" && series.x[i] <= 0) continue;
    if (yKind === "log" && series.y[i] <= 0) continue;
    xs.push(series.x[i]);
    ys.push(series.y[i]);
  }
  return { label: series.label, x: xs, y: ys };
}

function buildScene(spec: FigureSpec, seriesList: Series[], options: RenderOptions): Scene {
  const xKind = options.xScale ?? spec.xScale;
  const yKind = options.yScale ?? spec.yScale;
  const usable = seriesList
    .map((s) => usableOnScales(s, xKind, yKind))
    .filter((s) => s.x.length > 0);
  if (usable.length === 0) {
    throw new Error("no data rows");
  }
  const xDomain = padDomain(extent(usable.map((s) => s.x)), xKind);
  const yDomain = padDomain(extent(usable.map((s) => s.y)), yKind);
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const xScale: Scale = makeScale(xKind, xDomain, [left, right]);
  const yScale: Scale = makeScale(yKind, yDomain, [bottom, top]);

  const scene: Scene = { lines: [], texts: [] };

  for (const tick of xScale.ticks()) {
    const x = xScale.map(tick);
    scene.lines.push({ xs: [x, x], ys: [top, bottom], color: GRID, width: 1 });
    scene.lines.push({ xs: [x, x], ys: [bottom, bottom + 4], color: AXIS, width: 1 });
    scene.texts.push({
      x,
      y: bottom + 8,
      text: formatTick(tick),
      color: TEXT,
      anchor: "middle",
    });
  }
  for (const tick of yScale.ticks()) {
    const y = yScale.map(tick);
    scene.lines.push({ xs: [left, right], ys: [y, y], color: GRID, width: 1 });
    scene.lines.push({ xs: [left - 4, left], ys: [y, y], color: AXIS, width: 1 });
    scene.texts.push({
      x: left - 8,
      y: y - GLYPH_HEIGHT / 2,
      text: formatTick(tick),
      color: TEXT,
      anchor: "end",
    });
  }

  // plot frame on top of gridlines
  scene.lines.push({ xs: [left, right, right, left, left], ys: [top, top, bottom, bottom, top], color: AXIS, width: 1 });

  scene.texts.push({
    x: (left + right) / 2,
    y: HEIGHT - 24,
    text: spec.xLabel,
    color: TEXT,
    anchor: "middle",
  });
  scene.texts.push({ x: left, y: top - 24, text: spec.yLabel, color: TEXT, anchor: "start" });
  scene.texts.push({
    x: (left + right) / 2,
    y: 8,
    text: spec.title,
    color: TEXT,
    anchor: "middle",
  });

  usable.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const emphasized = series.label.startsWith("bound");
    scene.lines.push({
      xs: series.x.map((v) => xScale.map(v)),
      ys: series.y.map((v) => yScale.map(v)),
      color,
      width: emphasized ? 3 : 1,
    });
  });

  // legend, to the right of the plot frame
  const legendX = right + 12;
  usable.forEach((series, index) => {
    const y = top + 10 + index * 16;
    if (y > bottom) {
      return;
    }
    const color = PALETTE[index % PALETTE.length];
    scene.lines.push({ xs: [legendX, legendX + 18], ys: [y, y], color, width: 3 });
    scene.texts.push({
      x: legendX + 24,
      y: y - GLYPH_HEIGHT / 2,
      text: series.label,
      color: TEXT,
      anchor: "start",
    });
  });

  return scene;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function rgb(color: Rgb): string {
  return `rgb(${color[0]},${color[1]},${color[2]})`;
}

function sceneToSvg(scene: Scene): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  for (const line of scene.lines) {
    const points = line.xs.map((x, i) => `${x.toFixed(2)},${line.ys[i].toFixed(2)}`).join(" ");
    parts.push(
      `<polyline points="${points}" fill="none" stroke="${rgb(line.color)}" ` +
        `stroke-width="${line.width}"/>`,
    );
  }
  for (const text of scene.texts) {
    const anchor =
      text.anchor === "middle" ? "middle" : text.anchor === "end" ? "end" : "start";
    parts.push(
      `<text x="${text.x.toFixed(2)}" y="${(text.y + GLYPH_HEIGHT).toFixed(2)}" ` +
        `font-family="monospace" font-size="11" fill="${rgb(text.color)}" ` +
        `text-anchor="${anchor}">${escapeXml(text.text)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function sceneToPng(scene: Scene): Buffer {
  const raster = new Raster(WIDTH, HEIGHT);
  for (const line of scene.lines) {
    raster.drawPolyline(line.xs, line.ys, line.color, line.width);
  }
  for (const text of scene.texts) {
    let x = text.x;
    if (text.anchor === "middle") {
      x -= textWidth(text.text) / 2;
    } else if (text.anchor === "end") {
      x -= textWidth(text.text);
    }
    raster.drawText(x, text.y, text.text, text.color);
  }
  return encodePng(WIDTH, HEIGHT, raster.pixels);
}

export function renderFigure(id: FigureId, csvText: string, options: RenderOptions = {}): Rendered {
  const spec = FIGURES[id];
  if (!spec) {
    throw new Error(`unknown figure id: ${id}`);
  }
  const seriesList = extractSeries(spec, csvText);
  const scene = buildScene(spec, seriesList, options);
  return { svg: sceneToSvg(scene), png: sceneToPng(scene) };
}
