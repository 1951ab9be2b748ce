/**
 * Generation/embedding engines behind the wire protocol.
 *
 * ProceduralEngine is the default: a seed-deterministic synthesizer that
 * honors every request field (adapter weight blends pixel-wise, so weight
 * 0.0 is byte-identical to running without the adapter) and an embedder
 * keyed on decoded pixel content.  It exists so the protocol, clients and
 * stores can be exercised on any machine; pointing the server at a real
 * diffusion/CLIP/ArcFace stack is an engine swap (see UpstreamEngine).
 */

import { PNG } from 'pngjs';
import { GenerateRequest, Modality, MODALITY_DIMS, EmbedResponse } from './protocol.js';
import { HashStream, sha256Hex } from './rng.js';

export class UnknownAdapterError extends Error {}
export class UndecodableImageError extends Error {}

export interface Engine {
  backendId: string;
  generate(request: GenerateRequest): Promise<Buffer>;
  embed(image: Buffer, modality: Modality): Promise<EmbedResponse>;
}

export interface ProceduralEngineOptions {
  adapters: Record<string, string>; // name -> artifact path (provenance only)
  backendId?: string;
  latencyMs?: number; // simulated per-request latency, for saturation tests
}

// Luminance variance below this reads as "no face" (blank/flat images).
const FACE_VARIANCE_THRESHOLD = 1.0;

function canonicalBaseKey(request: GenerateRequest): string {
  // Adapter excluded: the zero-weight output must equal the no-adapter output.
  return JSON.stringify([
    request.prompt,
    request.negative_prompt,
    request.seed,
    request.guidance_scale,
    request.steps,
    request.width,
    request.height,
  ]);
}

export class ProceduralEngine implements Engine {
  readonly backendId: string;
  private adapters: Record<string, string>;
  private latencyMs: number;

  constructor(options: ProceduralEngineOptions) {
    this.adapters = options.adapters;
    this.backendId = options.backendId ?? 'procedural-sd-ref-1';
    this.latencyMs = options.latencyMs ?? 0;
  }

  hasAdapter(name: string): boolean {
    return Object.prototype.hasOwnProperty.call(this.adapters, name);
  }

  async generate(request: GenerateRequest): Promise<Buffer> {
    if (this.latencyMs > 0) {
      await new Promise((resolve) => setTimeout(resolve, this.latencyMs));
    }
    const { width, height } = request;
    const key = canonicalBaseKey(request);
    const base = new HashStream('image', key).bytes(width * height);
    let pixels = base;
    if (request.adapter) {
      if (!this.hasAdapter(request.adapter.name)) {
        throw new UnknownAdapterError(request.adapter.name);
      }
      const w = request.adapter.weight;
      if (w > 0) {
        const overlay = new HashStream('adapter', request.adapter.name, key).bytes(
          width * height,
        );
        pixels = Buffer.alloc(width * height);
        for (let i = 0; i < pixels.length; i++) {
          pixels[i] = Math.round(base[i] * (1 - w) + overlay[i] * w);
        }
      }
    }
    const png = new PNG({ width, height });
    for (let i = 0; i < width * height; i++) {
      png.data[4 * i] = pixels[i];
      png.data[4 * i + 1] = pixels[i];
      png.data[4 * i + 2] = pixels[i];
      png.data[4 * i + 3] = 255;
    }
    return PNG.sync.write(png);
  }

  async embed(image: Buffer, modality: Modality): Promise<EmbedResponse> {
    let decoded: PNG;
    try {
      decoded = PNG.sync.read(image);
    } catch (err) {
      throw new UndecodableImageError(String(err));
    }
    const n = decoded.width * decoded.height;
    const luminance = Buffer.alloc(n);
    let sum = 0;
    for (let i = 0; i < n; i++) {
      const v = Math.round(
        0.299 * decoded.data[4 * i] +
          0.587 * decoded.data[4 * i + 1] +
          0.114 * decoded.data[4 * i + 2],
      );
      luminance[i] = v;
      sum += v;
    }
    const mean = sum / n;
    let variance = 0;
    for (let i = 0; i < n; i++) {
      variance += (luminance[i] - mean) ** 2;
    }
    variance /= n;

    if (modality === 'face') {
      if (variance < FACE_VARIANCE_THRESHOLD) {
        return { vector: null, face_detected: false, model_id: this.modelId(modality) };
      }
      return {
        vector: this.vectorFor(luminance, modality),
        face_detected: true,
        model_id: this.modelId(modality),
      };
    }
    return { vector: this.vectorFor(luminance, modality), model_id: this.modelId(modality) };
  }

  private vectorFor(luminance: Buffer, modality: Modality): number[] {
    const dim = MODALITY_DIMS[modality];
    const raw = new HashStream('embed', modality, sha256Hex(luminance)).normals(dim);
    let norm = 0;
    for (let i = 0; i < dim; i++) norm += raw[i] * raw[i];
    norm = Math.sqrt(norm);
    return Array.from(raw, (x) => x / norm);
  }

  private modelId(modality: Modality): string {
    return modality === 'face' ? 'procedural-arcface-512' : 'procedural-clip-vit-l14-768';
  }
}

/**
 * Forwards requests verbatim to another wire-protocol server (e.g. a
 * GPU box running the real SD/CLIP/ArcFace stack).
 */
export class UpstreamEngine implements Engine {
  readonly backendId: string;

  constructor(private baseUrl: string, backendId?: string) {
    this.backendId = backendId ?? `upstream:${baseUrl}`;
  }

  async generate(request: GenerateRequest): Promise<Buffer> {
    const resp = await fetch(`${this.baseUrl}/v1/generate`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
    if (resp.status === 404) throw new UnknownAdapterError(request.adapter?.name ?? '');
    if (!resp.ok) throw new Error(`upstream generate failed: ${resp.status}`);
    return Buffer.from(await resp.arrayBuffer());
  }

  async embed(image: Buffer, modality: Modality): Promise<EmbedResponse> {
    const form = new FormData();
    form.append('request', new Blob([JSON.stringify({ modality })], { type: 'application/json' }));
    form.append('image', new Blob([new Uint8Array(image)], { type: 'image/png' }), 'image.png');
    const resp = await fetch(`${this.baseUrl}/v1/embed`, { method: 'POST', body: form });
    if (resp.status === 400) throw new UndecodableImageError('upstream rejected image');
    if (!resp.ok) throw new Error(`upstream embed failed: ${resp.status}`);
    return (await resp.json()) as EmbedResponse;
  }
}
