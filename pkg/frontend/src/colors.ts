/**
 * Risk color scale. One fixed ramp over [0, 1] shared by every view, so the
 * same risk value always gets the same color no matter where it appears.
 */

/** Nine-stop yellow-to-dark-red ramp, evenly spaced over [0, 1]. */
export const RAMP_STOPS = [
  "#ffffcc",
  "#ffeda0",
  "#fed976",
  "#feb24c",
  "#fd8d3c",
  "#fc4e2a",
  "#e31a1c",
  "#bd0026",
  "#800026",
] as const;

/** Fill used for zero risk; also the neutral background for risk-free nodes. */
export const NEUTRAL_FILL = RAMP_STOPS[0];

interface Rgb {
  r: number;
  g: number;
  b: number;
}

function parseHex(hex: string): Rgb {
  return {
    r: parseInt(hex.slice(1, 3), 16),
    g: parseInt(hex.slice(3, 5), 16),
    b: parseInt(hex.slice(5, 7), 16),
  };
}

function toHex(channel: number): string {
  return Math.round(channel).toString(16).padStart(2, "0");
}

/**
 * Map a risk value to a fill color. Values are clamped into [0, 1]; the scale
 * itself never rescales to the data, so colors are comparable across views.
 */
export function riskColor(value: number): string {
  const clamped = Math.min(1, Math.max(0, value));
  const scaled = clamped * (RAMP_STOPS.length - 1);
  const lower = Math.min(Math.floor(scaled), RAMP_STOPS.length - 2);
  const t = scaled - lower;
  const a = parseHex(RAMP_STOPS[lower]);
  const b = parseHex(RAMP_STOPS[lower + 1]);
  const mix = {
    r: a.r + (b.r - a.r) * t,
    g: a.g + (b.g - a.g) * t,
    b: a.b + (b.b - a.b) * t,
  };
  return `#${toHex(mix.r)}${toHex(mix.g)}${toHex(mix.b)}`;
}

/** Text color that stays readable on top of riskColor(value). */
export function labelColor(value: number): string {
  const clamped = Math.min(1, Math.max(0, value));
  return clamped < 0.6 ? "#1a1a1a" : "#ffffff";
}
