/** Pure view-model for the ranked results list.
 *
 * The server's descending order is preserved verbatim; the novel colormap,
 * when present, is pinned above the ranking.
 */

import type { ResultsPayload } from "./api.js";

export interface ResultRow {
  id: string;
  label: string;
  colors: string[];
  score: number | null;
  pinned: boolean;
}

export function buildResultRows(results: ResultsPayload): ResultRow[] {
  const rows: ResultRow[] = [];
  if (results.novel !== null) {
    rows.push({
      id: "novel",
      label: "new colormap (created for you)",
      colors: results.novel.colors,
      score: results.novel.reward,
      pinned: true,
    });
  }
  for (const entry of results.ranking) {
    rows.push({
      id: entry.id,
      label: entry.id,
      colors: entry.colors,
      score: entry.score,
      pinned: false,
    });
  }
  return rows;
}

/** The click-to-copy export payload: 256 comma-separated hex values. */
export function exportString(colors: string[]): string {
  return colors.join(",");
}
