/**
 * Binary tensor file (BTF) codec.
 *
 * Layout: magic "BTF1" | dtype byte (0 = uint8 binary, 1 = float32) |
 * ndim byte (2 or 3) | ndim little-endian uint64 extents | row-major
 * payload. Float payloads are little-endian IEEE 754 singles.
 */

const MAGIC = new Uint8Array([0x42, 0x54, 0x46, 0x31]); // "BTF1"
const CODE_BINARY = 0;
const CODE_REAL = 1;
const MAX_CELLS = 1n << 40n;

/** Malformed file bytes or grid content the format cannot represent. */
export class BtfError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BtfError";
  }
}

/**
 * A dense row-major 2D/3D field. `Uint8Array` data is a binary grid
 * (values 0/1); `Float32Array` data is a real-valued grid.
 */
export interface NdGrid {
  shape: number[];
  data: Uint8Array | Float32Array;
}

function checkedCells(shape: number[]): number {
  if (shape.length !== 2 && shape.length !== 3) {
    throw new BtfError(`grid must be 2D or 3D, got ${shape.length}D`);
  }
  let cells = 1;
  for (const extent of shape) {
    if (!Number.isInteger(extent) || extent <= 0) {
      throw new BtfError(`grid extents must be positive integers, got [${shape}]`);
    }
    cells *= extent;
  }
  return cells;
}

/** Serializes a grid; binary payload values are checked, floats pass bit-exact. */
export function encodeBtf(grid: NdGrid): Uint8Array {
  const cells = checkedCells(grid.shape);
  const data = grid.data;
  if (data.length !== cells) {
    throw new BtfError(`payload has ${data.length} cells, shape [${grid.shape}] requires ${cells}`);
  }
  const binary = data instanceof Uint8Array;
  if (binary) {
    for (let i = 0; i < data.length; i++) {
      if (data[i] > 1) {
        throw new BtfError(`binary grid values must be 0 or 1, found ${data[i]}`);
      }
    }
  } else if (!(data instanceof Float32Array)) {
    throw new BtfError("grid data must be a Uint8Array or Float32Array");
  }
  const ndim = grid.shape.length;
  const base = 6 + 8 * ndim;
  const out = new Uint8Array(base + cells * (binary ? 1 : 4));
  const view = new DataView(out.buffer);
  out.set(MAGIC, 0);
  out[4] = binary ? CODE_BINARY : CODE_REAL;
  out[5] = ndim;
  for (let i = 0; i < ndim; i++) {
    view.setBigUint64(6 + 8 * i, BigInt(grid.shape[i]), true);
  }
  if (binary) {
    out.set(data, base);
  } else {
    for (let i = 0; i < data.length; i++) {
      view.setFloat32(base + 4 * i, data[i], true);
    }
  }
  return out;
}

/** Parses file bytes back into a grid; every header field is validated. */
export function decodeBtf(bytes: Uint8Array): NdGrid {
  if (bytes.length < 4) {
    throw new BtfError(`file too short for header: ${bytes.length} bytes`);
  }
  for (let i = 0; i < 4; i++) {
    if (bytes[i] !== MAGIC[i]) {
      throw new BtfError("bad magic, expected BTF1");
    }
  }
  if (bytes.length < 6) {
    throw new BtfError("header ends before dtype/ndim bytes");
  }
  const code = bytes[4];
  if (code !== CODE_BINARY && code !== CODE_REAL) {
    throw new BtfError(`unknown dtype code ${code}`);
  }
  const ndim = bytes[5];
  if (ndim !== 2 && ndim !== 3) {
    throw new BtfError(`ndim must be 2 or 3, got ${ndim}`);
  }
  const base = 6 + 8 * ndim;
  if (bytes.length < base) {
    throw new BtfError("header ends inside the extents block");
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const shape: number[] = [];
  let cells = 1n;
  for (let i = 0; i < ndim; i++) {
    const extent = view.getBigUint64(6 + 8 * i, true);
    if (extent === 0n) {
      throw new BtfError("grid extents must be positive");
    }
    cells *= extent;
    shape.push(Number(extent));
  }
  if (cells > MAX_CELLS) {
    throw new BtfError(`refusing to allocate ${cells} cells`);
  }
  const total = Number(cells);
  const expected = total * (code === CODE_BINARY ? 1 : 4);
  const actual = bytes.length - base;
  if (actual !== expected) {
    throw new BtfError(`payload is ${actual} bytes, header requires ${expected}`);
  }
  if (code === CODE_BINARY) {
    const data = bytes.slice(base);
    for (let i = 0; i < data.length; i++) {
      if (data[i] > 1) {
        throw new BtfError(`binary grid values must be 0 or 1, found ${data[i]}`);
      }
    }
    return { shape, data };
  }
  const data = new Float32Array(total);
  for (let i = 0; i < total; i++) {
    data[i] = view.getFloat32(base + 4 * i, true);
  }
  return { shape, data };
}
