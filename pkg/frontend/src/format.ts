// Display helpers. Formatting is the console's only liberty with the data;
// every number shown comes from the API as-is.

export function formatCount(value: number): string {
  return value.toLocaleString("en-US");
}

/** Integer percents come from the server; null renders as an em dash. */
export function formatPct(value: number | null): string {
  return value === null ? "—" : `${value}%`;
}

export function formatKappa(value: number | null): string {
  return value === null ? "—" : value.toFixed(4);
}

export function formatToxicity(value: number): string {
  return value.toFixed(4);
}
