/** Axis scales and tick generation for linear and logarithmic axes. */

export interface Tick {
  value: number;
  label: string;
}

export interface Scale {
  map(value: number): number;
  ticks(): Tick[];
  readonly domain: [number, number];
  readonly range: [number, number];
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) {
    const exp = Math.floor(Math.log10(abs));
    const mant = v / 10 ** exp;
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${Number(mant.toFixed(2))}x`;
    return `${m}1E${exp}`;
  }
  return `${Number(v.toPrecision(6))}`;
}

export function niceLinearTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) || 1;
    lo -= pad / 2;
    hi += pad / 2;
  }
  const rawStep = (hi - lo) / Math.max(count - 1, 1);
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const candidates = [1, 2, 2.5, 5, 10].map((c) => c * mag);
  const step = candidates.find((c) => c >= rawStep) ?? candidates[candidates.length - 1];
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) ticks.push(Number(v.toPrecision(12)));
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const eLo = Math.ceil(Math.log10(lo) - 1e-9);
  const eHi = Math.floor(Math.log10(hi) + 1e-9);
  const ticks: number[] = [];
  if (eHi - eLo >= 1) {
    for (let e = eLo; e <= eHi; e++) ticks.push(10 ** e);
  } else {
    // less than one decade: fall back to nice linear ticks inside the span
    return niceLinearTicks(lo, hi, 5).filter((v) => v > 0);
  }
  return ticks;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (!(d1 > d0)) {
    const pad = Math.abs(d0) || 1;
    d0 -= pad / 2;
    d1 += pad / 2;
  }
  const [r0, r1] = range;
  const k = (r1 - r0) / (d1 - d0);
  return {
    domain: [d0, d1],
    range,
    map: (v) => r0 + (v - d0) * k,
    ticks: () =>
      niceLinearTicks(d0, d1).map((value) => ({ value, label: formatTick(value) })),
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (!(d0 > 0) || !(d1 > 0)) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  if (!(d1 > d0)) {
    d0 /= 2;
    d1 *= 2;
  }
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const k = (r1 - r0) / (Math.log10(d1) - l0);
  return {
    domain: [d0, d1],
    range,
    map: (v) => r0 + (Math.log10(v) - l0) * k,
    ticks: () =>
      logTicks(d0, d1).map((value) => ({ value, label: formatTick(value) })),
  };
}
