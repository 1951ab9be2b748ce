import { PNG } from 'pngjs';
import { describe, expect, it } from 'vitest';
import { ProceduralEngine, UndecodableImageError, UnknownAdapterError } from '../src/engine.js';
import { GenerateRequest } from '../src/protocol.js';

const engine = new ProceduralEngine({
  adapters: { default: 'procedural://adapter/default', marilyn: 'procedural://adapter/marilyn' },
});

function request(overrides: Partial<GenerateRequest> = {}): GenerateRequest {
  return {
    prompt: 'a mushroom',
    negative_prompt: '',
    seed: 1000,
    guidance_scale: 7.5,
    steps: 30,
    width: 64,
    height: 64,
    ...overrides,
  };
}

function solidPng(value: number, size = 32): Buffer {
  const png = new PNG({ width: size, height: size });
  for (let i = 0; i < size * size; i++) {
    png.data[4 * i] = value;
    png.data[4 * i + 1] = value;
    png.data[4 * i + 2] = value;
    png.data[4 * i + 3] = 255;
  }
  return PNG.sync.write(png);
}

describe('procedural engine', () => {
  it('is deterministic per request', async () => {
    const a = await engine.generate(request());
    const b = await engine.generate(request());
    expect(a.equals(b)).toBe(true);
    const c = await engine.generate(request({ seed: 1001 }));
    expect(a.equals(c)).toBe(false);
  });

  it('honors every request knob', async () => {
    const base = await engine.generate(request());
    for (const variant of [
      request({ prompt: 'a goblin' }),
      request({ negative_prompt: 'blurry' }),
      request({ guidance_scale: 11 }),
      request({ steps: 20 }),
    ]) {
      expect((await engine.generate(variant)).equals(base)).toBe(false);
    }
    const sized = await engine.generate(request({ width: 32, height: 16 }));
    const decoded = PNG.sync.read(sized);
    expect([decoded.width, decoded.height]).toEqual([32, 16]);
  });

  it('zero-weight adapter equals no adapter for 3 fixed seeds', async () => {
    for (const seed of [1, 2, 3]) {
      const bare = await engine.generate(request({ seed }));
      const zero = await engine.generate(
        request({ seed, adapter: { name: 'marilyn', weight: 0.0 } }),
      );
      expect(zero.equals(bare)).toBe(true);
      const full = await engine.generate(
        request({ seed, adapter: { name: 'marilyn', weight: 1.0 } }),
      );
      expect(full.equals(bare)).toBe(false);
    }
  });

  it('adapter weight interpolates between base and overlay', async () => {
    const half = await engine.generate(
      request({ adapter: { name: 'marilyn', weight: 0.5 } }),
    );
    const full = await engine.generate(
      request({ adapter: { name: 'marilyn', weight: 1.0 } }),
    );
    expect(half.equals(full)).toBe(false);
  });

  it('rejects unknown adapters', async () => {
    await expect(
      engine.generate(request({ adapter: { name: 'nope', weight: 1.0 } })),
    ).rejects.toBeInstanceOf(UnknownAdapterError);
  });

  it('embeds with the right dimensions and determinism', async () => {
    const png = await engine.generate(request());
    const clip = await engine.embed(png, 'image_clip');
    expect(clip.vector).toHaveLength(768);
    expect(clip.model_id).toContain('clip');
    const norm = Math.sqrt(clip.vector!.reduce((acc, x) => acc + x * x, 0));
    expect(norm).toBeCloseTo(1.0, 6);
    const again = await engine.embed(png, 'image_clip');
    expect(again.vector).toEqual(clip.vector);
    const face = await engine.embed(png, 'face');
    expect(face.face_detected).toBe(true);
    expect(face.vector).toHaveLength(512);
  });

  it('reports no face on a blank solid-color image', async () => {
    const face = await engine.embed(solidPng(200), 'face');
    expect(face.face_detected).toBe(false);
    expect(face.vector).toBeNull();
    // image_clip still embeds flat images
    const clip = await engine.embed(solidPng(200), 'image_clip');
    expect(clip.vector).toHaveLength(768);
  });

  it('rejects undecodable bytes', async () => {
    await expect(engine.embed(Buffer.from('garbage'), 'image_clip')).rejects.toBeInstanceOf(
      UndecodableImageError,
    );
  });
});
