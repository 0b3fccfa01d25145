/** Palette metadata for the gates the grid can place. */

export interface GateDef {
  /** Wire-format name (lowercase, as the circuit JSON expects). */
  name: string;
  label: string;
  arity: number;
  numParams: number;
  /** Per-qubit glyphs in role order, e.g. control then target for cx. */
  roles: string[];
  description: string;
}

export const GATE_DEFS: GateDef[] = [
  { name: "h", label: "H", arity: 1, numParams: 0, roles: ["H"], description: "Hadamard" },
  { name: "x", label: "X", arity: 1, numParams: 0, roles: ["X"], description: "Pauli X" },
  { name: "y", label: "Y", arity: 1, numParams: 0, roles: ["Y"], description: "Pauli Y" },
  { name: "z", label: "Z", arity: 1, numParams: 0, roles: ["Z"], description: "Pauli Z" },
  { name: "s", label: "S", arity: 1, numParams: 0, roles: ["S"], description: "Phase" },
  { name: "sdg", label: "S†", arity: 1, numParams: 0, roles: ["S†"], description: "Phase dagger" },
  { name: "t", label: "T", arity: 1, numParams: 0, roles: ["T"], description: "T" },
  { name: "tdg", label: "T†", arity: 1, numParams: 0, roles: ["T†"], description: "T dagger" },
  { name: "rx", label: "Rx", arity: 1, numParams: 1, roles: ["Rx"], description: "X rotation (radians)" },
  { name: "ry", label: "Ry", arity: 1, numParams: 1, roles: ["Ry"], description: "Y rotation (radians)" },
  { name: "rz", label: "Rz", arity: 1, numParams: 1, roles: ["Rz"], description: "Z rotation (radians)" },
  { name: "cx", label: "CX", arity: 2, numParams: 0, roles: ["●", "⊕"], description: "Controlled NOT (control, target)" },
  { name: "cz", label: "CZ", arity: 2, numParams: 0, roles: ["●", "●"], description: "Controlled Z" },
  { name: "swap", label: "SW", arity: 2, numParams: 0, roles: ["✕", "✕"], description: "Swap" },
  { name: "ccx", label: "CCX", arity: 3, numParams: 0, roles: ["●", "●", "⊕"], description: "Toffoli (two controls, target)" },
];

const BY_NAME = new Map(GATE_DEFS.map((def) => [def.name, def]));

/** Importable but not placeable from the palette. */
const MATRIX_GATES = new Map<string, GateDef>([
  ["u1", { name: "u1", label: "U1", arity: 1, numParams: 0, roles: ["U1"], description: "Explicit 2x2 unitary" }],
  ["u2", { name: "u2", label: "U2", arity: 2, numParams: 0, roles: ["U2", "U2"], description: "Explicit 4x4 unitary" }],
]);

export function gateDef(name: string): GateDef | undefined {
  return BY_NAME.get(name) ?? MATRIX_GATES.get(name);
}

export function isPaletteGate(name: string): boolean {
  return BY_NAME.has(name);
}
