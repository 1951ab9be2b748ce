/**
 * Server configuration: port, adapter registry, engine selection.
 */

import { readFileSync } from 'node:fs';
import { z } from 'zod';

export const ServerConfigSchema = z.object({
  port: z.number().int().min(0).default(8763),
  backend_id: z.string().default('procedural-sd-ref-1'),
  model_path: z.string().default('procedural://sd15-class'),
  device: z.string().default('cpu'),
  // adapter name -> artifact path; requests may only reference these names
  adapters: z.record(z.string()).default({ default: 'procedural://adapter/default' }),
  // requests in flight before the server sheds load with 503
  max_concurrent: z.number().int().min(1).default(4),
  // simulated per-generate latency; useful for saturation tests
  latency_ms: z.number().min(0).default(0),
  // forward to another wire server instead of the procedural engine
  upstream_url: z.string().url().optional(),
});

export type ServerConfig = z.infer<typeof ServerConfigSchema>;

export function loadConfig(path?: string): ServerConfig {
  if (!path) {
    return ServerConfigSchema.parse({});
  }
  const raw = JSON.parse(readFileSync(path, 'utf8'));
  return ServerConfigSchema.parse(raw);
}
