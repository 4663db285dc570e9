/** Number display: server values pass through verbatim.
 *
 * The UI performs no energy math and no rounding: a displayed number is the
 * decimal form of exactly the value the API returned.  Contract tests assert
 * byte-for-byte equality against recorded fixtures.
 */

export function displayNumber(value: number | null | undefined): string {
  if (value === null || value === undefined) {
    return "—";
  }
  return String(value);
}

export function withUnit(value: number | null | undefined, unit: string): string {
  const text = displayNumber(value);
  return text === "—" ? text : `${text} ${unit}`;
}
