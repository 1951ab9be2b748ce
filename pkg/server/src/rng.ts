/**
 * Deterministic byte/number stream: SHA-256 in counter mode.
 *
 * Platform- and version-independent, so identical requests produce
 * identical images and embeddings on any host.
 */

import { createHash } from 'node:crypto';

export class HashStream {
  private base: Buffer;
  private counter = 0n;
  private buf: Buffer = Buffer.alloc(0);
  private pos = 0;

  constructor(...keyParts: Array<string | number>) {
    const key = keyParts.map(String).join('\x1f');
    this.base = createHash('sha256').update(key, 'utf8').digest();
  }

  bytes(n: number): Buffer {
    const chunks: Buffer[] = [];
    let have = this.buf.length - this.pos;
    chunks.push(this.buf.subarray(this.pos));
    while (have < n) {
      const ctr = Buffer.alloc(8);
      ctr.writeBigUInt64LE(this.counter);
      this.counter += 1n;
      const block = createHash('sha256').update(Buffer.concat([this.base, ctr])).digest();
      chunks.push(block);
      have += block.length;
    }
    const all = Buffer.concat(chunks);
    this.buf = all;
    this.pos = n;
    return all.subarray(0, n);
  }

  /** n standard normal draws (Box-Muller over 53-bit uniforms). */
  normals(n: number): Float64Array {
    const out = new Float64Array(n);
    const m = Math.ceil(n / 2);
    const raw = this.bytes(16 * m);
    for (let i = 0; i < m; i++) {
      const hi = raw.readBigUInt64LE(16 * i);
      const lo = raw.readBigUInt64LE(16 * i + 8);
      const u1 = (Number(hi >> 11n) + 1) * 2 ** -53; // (0, 1]
      const u2 = Number(lo >> 11n) * 2 ** -53;
      const r = Math.sqrt(-2 * Math.log(u1));
      const theta = 2 * Math.PI * u2;
      out[2 * i] = r * Math.cos(theta);
      if (2 * i + 1 < n) out[2 * i + 1] = r * Math.sin(theta);
    }
    return out;
  }
}

export function sha256Hex(data: Buffer | string): string {
  return createHash('sha256').update(data).digest('hex');
}
