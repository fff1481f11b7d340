import { ApiClient } from "./api";
import { App } from "./app";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app root element");
}
const app = new App(new ApiClient(), root);
void app.refresh().catch((error) => {
  root.textContent = `failed to load register: ${error}`;
});
