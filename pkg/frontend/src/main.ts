// Browser bootstrap: read the API base URL from window config (falling
// back to same-origin), take the candidate id from the entry form, and
// hand the page over to the app.

import { ApiClient } from "./api.js";
import { ElicitationApp } from "./app.js";

declare global {
  interface Window {
    EMORANK_API_BASE?: string;
  }
}

function bootstrap(): void {
  const apiBase = window.EMORANK_API_BASE ?? "";
  const form = document.getElementById("entry-form") as HTMLFormElement | null;
  const input = document.getElementById("candidate-id") as HTMLInputElement | null;
  const root = document.getElementById("app");
  if (!form || !input || !root) return;

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const candidateId = input.value.trim();
    if (!candidateId) return;
    form.hidden = true;
    const app = new ElicitationApp(root, new ApiClient(apiBase), candidateId);
    void app.start();
  });
}

bootstrap();
