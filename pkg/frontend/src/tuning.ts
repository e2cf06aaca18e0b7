/** Equal-temperament tuning, A4 = 440 Hz. */

export function midiToHz(midi: number): number {
  return 440.0 * Math.pow(2, (midi - 69) / 12);
}

const NOTE_NAMES = [
  "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
] as const;

/** e.g. 60 -> "C4", 57 -> "A3". */
export function midiToName(midi: number): string {
  const name = NOTE_NAMES[((midi % 12) + 12) % 12];
  const octave = Math.floor(midi / 12) - 1;
  return `${name}${octave}`;
}

export function formatHz(hz: number): string {
  return `${hz.toFixed(2)} Hz`;
}
