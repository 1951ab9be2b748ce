import { AddressInfo } from 'node:net';
import { Server } from 'node:http';
import { ServerConfigSchema, ServerConfig } from '../src/config.js';
import { createApp } from '../src/server.js';

export interface RunningServer {
  baseUrl: string;
  close(): Promise<void>;
}

export async function startServer(overrides: Partial<ServerConfig> = {}): Promise<RunningServer> {
  const config = ServerConfigSchema.parse({ port: 0, ...overrides });
  const app = createApp(config);
  const server: Server = await new Promise((resolve) => {
    const s = app.listen(0, () => resolve(s));
  });
  const port = (server.address() as AddressInfo).port;
  return {
    baseUrl: `http://127.0.0.1:${port}`,
    close: () =>
      new Promise<void>((resolve, reject) =>
        server.close((err) => (err ? reject(err) : resolve())),
      ),
  };
}

export async function postGenerate(baseUrl: string, body: unknown): Promise<Response> {
  return fetch(`${baseUrl}/v1/generate`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: typeof body === 'string' ? body : JSON.stringify(body),
  });
}

export async function postEmbed(
  baseUrl: string,
  modality: string,
  image: Buffer,
): Promise<Response> {
  const form = new FormData();
  form.append('request', new Blob([JSON.stringify({ modality })], { type: 'application/json' }));
  form.append('image', new Blob([new Uint8Array(image)], { type: 'image/png' }), 'image.png');
  return fetch(`${baseUrl}/v1/embed`, { method: 'POST', body: form });
}
