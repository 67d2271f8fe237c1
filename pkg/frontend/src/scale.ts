/** Axis scales and tick generation.  Pure functions; the renderer maps data
 * through one Scale per axis so SVG and raster output share geometry. */

export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  domain: [number, number];
  range: [number, number];
  map(value: number): number;
  ticks(): number[];
}

export function makeScale(kind: ScaleKind, domain: [number, number], range: [number, number]): Scale {
  if (kind === "log") {
    if (domain[0] <= 0 || domain[1] <= 0) {
      throw new Error(`log scale needs a positive domain, got [${domain[0]}, ${domain[1]}]`);
    }
    const lo = Math.log10(domain[0]);
    const hi = Math.log10(domain[1]);
    const span = hi === lo ? 1 : hi - lo;
    return {
      kind,
      domain,
      range,
      map: (value) => range[0] + ((Math.log10(value) - lo) / span) * (range[1] - range[0]),
      ticks: () => logTicks(domain[0], domain[1]),
    };
  }
  const span = domain[1] === domain[0] ? 1 : domain[1] - domain[0];
  return {
    kind,
    domain,
    range,
    map: (value) => range[0] + ((value - domain[0]) / span) * (range[1] - range[0]),
    ticks: () => linearTicks(domain[0], domain[1]),
  };
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (hi === lo) {
    return [lo];
  }
  const rawStep = (hi - lo) / target;
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = 10 * base;
  for (const m of [1, 2, 5]) {
    if (m * base >= rawStep) {
      step = m * base;
      break;
    }
  }
  const ticks: number[] = [];
  const first = Math.ceil(lo / step - 1e-9) * step;
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const first = Math.ceil(Math.log10(lo) - 1e-9);
  const last = Math.floor(Math.log10(hi) + 1e-9);
  const decades = last - first;
  const ticks: number[] = [];
  const mantissas = decades >= 3 ? [1] : [1, 2, 5];
  for (let exp = first - 1; exp <= last + 1; exp++) {
    for (const m of mantissas) {
      const value = m * Math.pow(10, exp);
      if (value >= lo * (1 - 1e-12) && value <= hi * (1 + 1e-12)) {
        ticks.push(value);
      }
    }
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

/** Compact tick label: plain decimal in a friendly range, 1e-style outside. */
export function formatTick(value: number): string {
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 0.001 && magnitude < 10000) {
    return String(Number(value.toPrecision(6)));
  }
  const exp = Math.floor(Math.log10(magnitude));
  const mantissa = Number((value / Math.pow(10, exp)).toPrecision(3));
  return mantissa === 1 ? `1e${exp}` : `${mantissa}e${exp}`;
}
