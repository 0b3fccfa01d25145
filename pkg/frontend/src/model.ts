/** Circuit grid model: n wires by t time-step columns, one gate per cell.
 *
 * The grid is the single source of truth for the editor. Serialization
 * flattens columns left to right, and gates inside one column top to bottom
 * (by their topmost wire), which makes export deterministic. Import packs
 * gates greedily into the earliest free column, so any exported circuit
 * reimports to an equal model.
 */

import { gateDef } from "./gatedefs.js";

export const MAX_QUBITS = 62;

export type MatrixEntry = [number, number];

export interface GateJson {
  name: string;
  qubits: number[];
  params?: number[];
  matrix?: MatrixEntry[];
}

export interface CircuitJson {
  name?: string;
  num_qubits: number;
  gates: GateJson[];
}

export interface PlacedGate {
  readonly id: number;
  readonly name: string;
  readonly column: number;
  /** Role order (control first for cx/ccx), all within one column. */
  readonly qubits: number[];
  params: number[];
  matrix?: MatrixEntry[];
}

export class CircuitGridModel {
  private placed: PlacedGate[] = [];
  private nextId = 1;

  constructor(
    public numQubits: number,
    public columns: number,
    public name?: string,
  ) {
    if (!Number.isInteger(numQubits) || numQubits < 1 || numQubits > MAX_QUBITS) {
      throw new Error(`numQubits must be in [1, ${MAX_QUBITS}], got ${numQubits}`);
    }
    if (!Number.isInteger(columns) || columns < 1) {
      throw new Error(`columns must be >= 1, got ${columns}`);
    }
  }

  gates(): readonly PlacedGate[] {
    return this.placed;
  }

  gateAt(column: number, wire: number): PlacedGate | undefined {
    return this.placed.find(
      (gate) => gate.column === column && gate.qubits.includes(wire),
    );
  }

  gateById(id: number): PlacedGate | undefined {
    return this.placed.find((gate) => gate.id === id);
  }

  /** Null when the placement is legal, otherwise the reason it is not. */
  placementError(name: string, column: number, qubits: number[]): string | null {
    const def = gateDef(name);
    if (!def) {
      return `unknown gate ${name}`;
    }
    if (qubits.length !== def.arity) {
      return `${name} needs ${def.arity} wire(s)`;
    }
    if (new Set(qubits).size !== qubits.length) {
      return "wires must be distinct";
    }
    if (!Number.isInteger(column) || column < 0 || column >= this.columns) {
      return `column ${column} out of range`;
    }
    for (const wire of qubits) {
      if (!Number.isInteger(wire) || wire < 0 || wire >= this.numQubits) {
        return `wire ${wire} out of range`;
      }
      if (this.gateAt(column, wire)) {
        return `cell (wire ${wire}, column ${column}) is occupied`;
      }
    }
    return null;
  }

  place(
    name: string,
    column: number,
    qubits: number[],
    params: number[] = [],
    matrix?: MatrixEntry[],
  ): PlacedGate {
    const error = this.placementError(name, column, qubits);
    if (error) {
      throw new Error(error);
    }
    const def = gateDef(name)!;
    if (params.length !== (def.numParams ?? 0)) {
      throw new Error(`${name} takes ${def.numParams} parameter(s)`);
    }
    const gate: PlacedGate = {
      id: this.nextId++,
      name,
      column,
      qubits: [...qubits],
      params: [...params],
      ...(matrix ? { matrix: matrix.map((pair) => [...pair] as MatrixEntry) } : {}),
    };
    this.placed.push(gate);
    return gate;
  }

  remove(id: number): boolean {
    const before = this.placed.length;
    this.placed = this.placed.filter((gate) => gate.id !== id);
    return this.placed.length < before;
  }

  clear(): void {
    this.placed = [];
  }

  setParams(id: number, params: number[]): void {
    const gate = this.gateById(id);
    if (!gate) {
      throw new Error(`no gate ${id}`);
    }
    const def = gateDef(gate.name)!;
    if (params.length !== def.numParams) {
      throw new Error(`${gate.name} takes ${def.numParams} parameter(s)`);
    }
    if (params.some((value) => !Number.isFinite(value))) {
      throw new Error("angles must be finite");
    }
    gate.params = [...params];
  }

  /** Null on success, otherwise the reason the resize was refused. */
  resize(numQubits: number, columns?: number): string | null {
    if (!Number.isInteger(numQubits) || numQubits < 1 || numQubits > MAX_QUBITS) {
      return `wire count must be in [1, ${MAX_QUBITS}]`;
    }
    const blocked = this.placed.find((gate) =>
      gate.qubits.some((wire) => wire >= numQubits),
    );
    if (blocked) {
      return `remove ${blocked.name} on wire ${Math.max(...blocked.qubits)} first`;
    }
    if (columns !== undefined) {
      if (!Number.isInteger(columns) || columns < 1) {
        return "column count must be >= 1";
      }
      const lastUsed = Math.max(-1, ...this.placed.map((gate) => gate.column));
      if (columns <= lastUsed) {
        return `gates occupy column ${lastUsed}`;
      }
      this.columns = columns;
    }
    this.numQubits = numQubits;
    return null;
  }

  /** Columns left to right, gates within a column top to bottom.
   *
   * Serialization uses left-packed columns (each gate at the earliest column
   * its wires allow, visual gaps dropped), so export -> import is an identity
   * even when the visual layout had holes; only gates on disjoint wires can
   * trade places, and those commute.
   */
  toJson(): CircuitJson {
    const visual = [...this.placed].sort((a, b) => {
      if (a.column !== b.column) {
        return a.column - b.column;
      }
      return Math.min(...a.qubits) - Math.min(...b.qubits);
    });
    const nextFree = new Array<number>(this.numQubits).fill(0);
    const packed = new Map<number, number>();
    for (const gate of visual) {
      const column = Math.max(...gate.qubits.map((wire) => nextFree[wire]));
      for (const wire of gate.qubits) {
        nextFree[wire] = column + 1;
      }
      packed.set(gate.id, column);
    }
    const ordered = visual.sort((a, b) => {
      const columnA = packed.get(a.id)!;
      const columnB = packed.get(b.id)!;
      if (columnA !== columnB) {
        return columnA - columnB;
      }
      return Math.min(...a.qubits) - Math.min(...b.qubits);
    });
    const gates: GateJson[] = ordered.map((gate) => {
      const entry: GateJson = { name: gate.name, qubits: [...gate.qubits] };
      if (gate.params.length > 0) {
        entry.params = [...gate.params];
      }
      if (gate.matrix) {
        entry.matrix = gate.matrix.map((pair) => [...pair] as MatrixEntry);
      }
      return entry;
    });
    const doc: CircuitJson = { num_qubits: this.numQubits, gates };
    if (this.name) {
      return { name: this.name, num_qubits: this.numQubits, gates };
    }
    return doc;
  }

  serialize(): string {
    return JSON.stringify(this.toJson());
  }

  equals(other: CircuitGridModel): boolean {
    return (
      this.numQubits === other.numQubits && this.serialize() === other.serialize()
    );
  }

  /** Greedy left-pack of a gate list into grid columns. */
  static fromJson(doc: CircuitJson, minColumns = 8): CircuitGridModel {
    if (!doc || typeof doc !== "object") {
      throw new Error("circuit document must be an object");
    }
    if (!Number.isInteger(doc.num_qubits)) {
      throw new Error("num_qubits must be an integer");
    }
    if (!Array.isArray(doc.gates)) {
      throw new Error("gates must be a list");
    }
    const nextFree = new Array<number>(doc.num_qubits).fill(0);
    let columnsNeeded = 0;
    const staged: Array<{ gate: GateJson; column: number }> = [];
    doc.gates.forEach((gate, index) => {
      const def = gateDef(gate.name);
      if (!def) {
        throw new Error(`gate ${index}: unknown gate ${gate.name}`);
      }
      if (!Array.isArray(gate.qubits) || gate.qubits.length !== def.arity) {
        throw new Error(`gate ${index}: ${gate.name} needs ${def.arity} wire(s)`);
      }
      for (const wire of gate.qubits) {
        if (!Number.isInteger(wire) || wire < 0 || wire >= doc.num_qubits) {
          throw new Error(`gate ${index}: wire ${wire} out of range`);
        }
      }
      const params = gate.params ?? [];
      if (params.length !== def.numParams) {
        throw new Error(
          `gate ${index}: ${gate.name} takes ${def.numParams} parameter(s)`,
        );
      }
      if (gate.name === "u1" || gate.name === "u2") {
        const want = def.arity === 1 ? 4 : 16;
        if (!Array.isArray(gate.matrix) || gate.matrix.length !== want) {
          throw new Error(`gate ${index}: ${gate.name} needs ${want} matrix entries`);
        }
      }
      const column = Math.max(...gate.qubits.map((wire) => nextFree[wire]));
      for (const wire of gate.qubits) {
        nextFree[wire] = column + 1;
      }
      columnsNeeded = Math.max(columnsNeeded, column + 1);
      staged.push({ gate, column });
    });
    const model = new CircuitGridModel(
      doc.num_qubits,
      Math.max(minColumns, columnsNeeded),
      doc.name,
    );
    for (const { gate, column } of staged) {
      model.place(gate.name, column, gate.qubits, gate.params ?? [], gate.matrix);
    }
    return model;
  }

  static parse(text: string, minColumns = 8): CircuitGridModel {
    let doc: unknown;
    try {
      doc = JSON.parse(text);
    } catch (error) {
      throw new Error(`not valid JSON: ${(error as Error).message}`);
    }
    return CircuitGridModel.fromJson(doc as CircuitJson, minColumns);
  }
}
