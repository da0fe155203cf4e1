// Metric display. Every number shown here arrives verbatim from the service
// report; this module formats, it never computes. Keep it free of arithmetic
// (a test enforces that).

import type { ReportDto } from "./types.js";

export interface MetricsRow {
  label: string;
  naive: string;
  smoothed: string;
}

export type BadgeColor = "green" | "red" | "none";

export interface MetricsView {
  rows: MetricsRow[];
  ratioText: string;
  badge: BadgeColor;
  badgeText: string;
}

function meters(value: number | null): string {
  if (value === null) {
    return "n/a";
  }
  return `${value.toFixed(4)} m`;
}

export function metricsView(report: ReportDto | null): MetricsView {
  if (report === null) {
    return { rows: [], ratioText: "", badge: "none", badgeText: "no report yet" };
  }
  const rows: MetricsRow[] = [
    {
      label: "transition distance",
      naive: meters(report.naive.transition_m),
      smoothed: meters(report.smoothed.transition_m),
    },
    {
      label: "spatial distance",
      naive: meters(report.naive.spatial_m),
      smoothed: meters(report.smoothed.spatial_m),
    },
  ];
  let ratioText: string;
  if (report.ratio === null) {
    ratioText = "n/a";
  } else if (report.ratio === "inf") {
    ratioText = "improvement: unbounded";
  } else {
    ratioText = `improvement: ${report.ratio.toFixed(2)}x`;
  }
  let badge: BadgeColor;
  let badgeText: string;
  if (report.plausible === null) {
    badge = "none";
    badgeText = "no spatial targets";
  } else if (report.plausible) {
    badge = "green";
    badgeText = "plausible (under 0.1 m)";
  } else {
    badge = "red";
    badgeText = "not plausible (0.1 m bound exceeded)";
  }
  return { rows, ratioText, badge, badgeText };
}
