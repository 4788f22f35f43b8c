import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { DomView } from "./dom.js";
import { PanelMode } from "./state.js";

function baseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? "http://127.0.0.1:8000";
}

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app container");

let app: App;
const view = new DomView(root, {
  onSelectZone: (zone) => app.selectZone(zone),
  onToggleLine: (line) => void app.toggleLine(line),
  onRun: () => void app.run(),
  onRevealHeels: () => void app.revealHeels(),
  onPanelMode: (mode: PanelMode) => app.setPanelMode(mode),
  onInspect: (zone) => app.inspectHighlight(zone),
});
app = new App(new ApiClient(baseUrl()), view);

app.init().catch((err) => view.showBanner(String(err)));
