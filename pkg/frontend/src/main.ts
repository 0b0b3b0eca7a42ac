/** Browser entry point: mount the console against the same origin. */

import { bootstrap } from "./app.js";

bootstrap(document, "", { pollIntervalMs: 5000 });
