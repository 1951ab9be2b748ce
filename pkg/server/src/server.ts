/**
 * Express app implementing the wire protocol.
 *
 * Responses carry X-Backend-Id; malformed JSON and undecodable images
 * are 400, unknown adapter names are 404, and load beyond
 * max_concurrent sheds with 503 (clients retry).
 */

import express, { Express, NextFunction, Request, Response } from 'express';
import { ZodError } from 'zod';
import { ServerConfig } from './config.js';
import {
  Engine,
  ProceduralEngine,
  UndecodableImageError,
  UnknownAdapterError,
  UpstreamEngine,
} from './engine.js';
import { EmbedRequestSchema, GenerateRequestSchema } from './protocol.js';

function parseMultipart(body: Buffer, contentType: string): Map<string, Buffer> {
  const match = /boundary=(?:"([^"]+)"|([^\s;]+))/.exec(contentType);
  if (!match) throw new Error('missing multipart boundary');
  const boundary = Buffer.from('--' + (match[1] ?? match[2]));
  const parts = new Map<string, Buffer>();
  let offset = body.indexOf(boundary);
  while (offset !== -1) {
    const next = body.indexOf(boundary, offset + boundary.length);
    if (next === -1) break;
    const segment = body.subarray(offset + boundary.length, next);
    const headerEnd = segment.indexOf('\r\n\r\n');
    if (headerEnd !== -1) {
      const head = segment.subarray(0, headerEnd).toString('latin1');
      const nameMatch = /name="([^"]+)"/.exec(head);
      if (nameMatch) {
        // strip the trailing CRLF that precedes the next boundary
        const content = segment.subarray(headerEnd + 4, segment.length - 2);
        parts.set(nameMatch[1], content);
      }
    }
    offset = next;
  }
  return parts;
}

export function buildEngine(config: ServerConfig): Engine {
  if (config.upstream_url) {
    return new UpstreamEngine(config.upstream_url, config.backend_id);
  }
  return new ProceduralEngine({
    adapters: config.adapters,
    backendId: config.backend_id,
    latencyMs: config.latency_ms,
  });
}

export function createApp(config: ServerConfig, engine?: Engine): Express {
  const app = express();
  const eng = engine ?? buildEngine(config);
  let inFlight = 0;

  app.post('/v1/generate', express.json({ limit: '1mb' }), async (req, res) => {
    if (inFlight >= config.max_concurrent) {
      res.status(503).json({ error: 'saturated, retry later' });
      return;
    }
    inFlight += 1;
    try {
      const request = GenerateRequestSchema.parse(req.body);
      const png = await eng.generate(request);
      res
        .status(200)
        .set('Content-Type', 'image/png')
        .set('X-Backend-Id', eng.backendId)
        .send(png);
    } catch (err) {
      if (err instanceof ZodError) {
        res.status(400).json({ error: 'invalid generate request', detail: err.issues });
      } else if (err instanceof UnknownAdapterError) {
        res.status(404).json({ error: `unknown adapter: ${err.message}` });
      } else {
        res.status(500).json({ error: String(err) });
      }
    } finally {
      inFlight -= 1;
    }
  });

  app.post(
    '/v1/embed',
    express.raw({ type: 'multipart/form-data', limit: '64mb' }),
    async (req, res) => {
      try {
        const parts = parseMultipart(req.body as Buffer, req.headers['content-type'] ?? '');
        const requestPart = parts.get('request');
        const imagePart = parts.get('image');
        if (!requestPart || !imagePart) {
          res.status(400).json({ error: 'multipart needs "request" and "image" parts' });
          return;
        }
        const { modality } = EmbedRequestSchema.parse(JSON.parse(requestPart.toString('utf8')));
        const doc = await eng.embed(imagePart, modality);
        res.status(200).set('X-Backend-Id', eng.backendId).json(doc);
      } catch (err) {
        if (err instanceof ZodError || err instanceof SyntaxError) {
          res.status(400).json({ error: 'invalid embed request' });
        } else if (err instanceof UndecodableImageError) {
          res.status(400).json({ error: 'image is not decodable PNG' });
        } else if (String(err).includes('multipart')) {
          res.status(400).json({ error: String(err) });
        } else {
          res.status(500).json({ error: String(err) });
        }
      }
    },
  );

  // express.json SyntaxError -> 400 (malformed JSON body)
  app.use((err: Error, _req: Request, res: Response, next: NextFunction) => {
    if (err instanceof SyntaxError) {
      res.status(400).json({ error: 'malformed JSON' });
      return;
    }
    next(err);
  });

  return app;
}
