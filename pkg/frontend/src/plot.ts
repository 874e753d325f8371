import { encodePng } from "./png.js";
import { Color, GLYPH_HEIGHT, Raster, textWidth } from "./raster.js";

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface FigureSpec {
  series: Series[];
  xLabel: string;
  yLabel: string;
  logY: boolean;
  width?: number;
  height?: number;
}

const PALETTE: Color[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
  [255, 127, 14],
  [148, 103, 189],
  [140, 86, 75],
];
const AXIS: Color = [40, 40, 40];
const GRID: Color = [225, 225, 225];

const MARGIN = { left: 78, right: 16, top: 14, bottom: 42 };

/** Tick label: plain for moderate magnitudes, exponent notation otherwise. */
export function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(1).toUpperCase().replace(".0E", "E");
  }
  const text = value.toPrecision(4);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}

function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / target;
  const magnitude = 10 ** Math.floor(Math.log10(raw));
  const residual = raw / magnitude;
  const step = magnitude * (residual < 1.5 ? 1 : residual < 3.5 ? 2 : residual < 7.5 ? 5 : 10);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    ticks.push(10 ** e);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

export function renderFigure(spec: FigureSpec): Buffer {
  const width = spec.width ?? 800;
  const height = spec.height ?? 520;
  const raster = new Raster(width, height);
  const plot = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    x1: width - MARGIN.right,
    y1: height - MARGIN.bottom,
  };

  const points = spec.series.map((series) => {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < series.x.length; i++) {
      if (spec.logY && !(series.y[i] > 0)) continue; // log scale drops y <= 0
      xs.push(series.x[i]);
      ys.push(series.y[i]);
    }
    return { label: series.label, xs, ys };
  });
  if (points.every((s) => s.xs.length === 0)) {
    throw new Error("nothing to plot (log scale removed every point?)");
  }

  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (const s of points) {
    for (const v of s.xs) {
      xMin = Math.min(xMin, v);
      xMax = Math.max(xMax, v);
    }
    for (const v of s.ys) {
      yMin = Math.min(yMin, v);
      yMax = Math.max(yMax, v);
    }
  }
  if (xMax === xMin) xMax = xMin + 1;
  if (yMax === yMin) yMax = yMin === 0 ? 1 : yMin * (spec.logY ? 10 : 2);

  const toX = (v: number) =>
    plot.x0 + ((v - xMin) / (xMax - xMin)) * (plot.x1 - plot.x0);
  const toY = spec.logY
    ? (v: number) =>
        plot.y1 -
        ((Math.log10(v) - Math.log10(yMin)) / (Math.log10(yMax) - Math.log10(yMin))) *
          (plot.y1 - plot.y0)
    : (v: number) => plot.y1 - ((v - yMin) / (yMax - yMin)) * (plot.y1 - plot.y0);

  // grid and ticks
  for (const tick of niceTicks(xMin, xMax)) {
    const px = Math.round(toX(tick));
    raster.vline(px, plot.y0, plot.y1, GRID);
    const label = formatTick(tick);
    raster.text(px - textWidth(label) / 2, plot.y1 + 6, label, AXIS);
  }
  const yTicks = spec.logY ? decadeTicks(yMin, yMax) : niceTicks(yMin, yMax);
  for (const tick of yTicks) {
    const py = Math.round(toY(tick));
    raster.hline(plot.x0, plot.x1, py, GRID);
    const label = formatTick(tick);
    raster.text(plot.x0 - textWidth(label) - 6, py - GLYPH_HEIGHT / 2, label, AXIS);
  }

  // frame
  raster.hline(plot.x0, plot.x1, plot.y1, AXIS);
  raster.hline(plot.x0, plot.x1, plot.y0, AXIS);
  raster.vline(plot.x0, plot.y0, plot.y1, AXIS);
  raster.vline(plot.x1, plot.y0, plot.y1, AXIS);

  // series
  points.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    for (let i = 1; i < series.xs.length; i++) {
      raster.line(
        toX(series.xs[i - 1]),
        toY(series.ys[i - 1]),
        toX(series.xs[i]),
        toY(series.ys[i]),
        color,
      );
    }
  });

  // axis labels
  raster.text(
    (plot.x0 + plot.x1) / 2 - textWidth(spec.xLabel) / 2,
    height - GLYPH_HEIGHT - 6,
    spec.xLabel,
    AXIS,
  );
  raster.textVertical(
    6,
    (plot.y0 + plot.y1) / 2 + textWidth(spec.yLabel) / 2,
    spec.yLabel,
    AXIS,
  );

  // legend, top-right inside the frame
  const legendWidth = Math.max(...points.map((s) => textWidth(s.label))) + 30;
  const lx = plot.x1 - legendWidth - 8;
  let ly = plot.y0 + 8;
  points.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    raster.hline(lx, lx + 18, ly + 3, color);
    raster.hline(lx, lx + 18, ly + 4, color);
    raster.text(lx + 24, ly, series.label, AXIS);
    ly += GLYPH_HEIGHT + 5;
  });

  return encodePng(width, height, raster.data);
}
