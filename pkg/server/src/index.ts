/**
 * Entry point: `node dist/index.js [--config server.json] [--port N]`.
 */

import { loadConfig } from './config.js';
import { createApp } from './server.js';

function argValue(flag: string): string | undefined {
  const idx = process.argv.indexOf(flag);
  return idx !== -1 ? process.argv[idx + 1] : undefined;
}

const config = loadConfig(argValue('--config'));
const portOverride = argValue('--port');
if (portOverride !== undefined) {
  config.port = Number(portOverride);
}

const app = createApp(config);
const server = app.listen(config.port, () => {
  const address = server.address();
  const port = typeof address === 'object' && address ? address.port : config.port;
  console.log(
    JSON.stringify({
      event: 'listening',
      port,
      backend_id: config.backend_id,
      model_path: config.model_path,
      device: config.device,
      adapters: Object.keys(config.adapters),
      engine: config.upstream_url ? 'upstream' : 'procedural',
    }),
  );
});
