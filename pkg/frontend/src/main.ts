import { EngineClient } from "./api.js";
import { StudioApp } from "./app.js";

// Same-origin by default; engine serve --static mounts this page next to
// the API so relative paths resolve.
window.addEventListener("DOMContentLoaded", () => {
  new StudioApp(document, new EngineClient(""));
});
