/**
 * Wire protocol types and validation (version 1).
 *
 * POST /v1/generate  JSON {prompt, negative_prompt, seed, guidance_scale,
 *                    steps, width, height, adapter?: {name, weight}}
 *                    -> 200 PNG body + X-Backend-Id header
 * POST /v1/embed     multipart: "request" part (JSON {modality}) + "image"
 *                    part (PNG) -> JSON {vector, face_detected?, model_id}
 */

import { z } from 'zod';

export const PROTOCOL_VERSION = 1;

export const AdapterSchema = z.object({
  name: z.string().min(1),
  weight: z.number().min(0).max(1),
});

export const GenerateRequestSchema = z.object({
  prompt: z.string(),
  negative_prompt: z.string().default(''),
  seed: z.number().int().min(0),
  guidance_scale: z.number().positive(),
  steps: z.number().int().positive(),
  width: z.number().int().positive(),
  height: z.number().int().positive(),
  adapter: AdapterSchema.optional(),
});

export type GenerateRequest = z.infer<typeof GenerateRequestSchema>;

export const EmbedRequestSchema = z.object({
  modality: z.enum(['image_clip', 'face']),
});

export type Modality = z.infer<typeof EmbedRequestSchema>['modality'];

export const MODALITY_DIMS: Record<Modality, number> = {
  image_clip: 768,
  face: 512,
};

export interface EmbedResponse {
  vector: number[] | null;
  face_detected?: boolean;
  model_id: string;
}
