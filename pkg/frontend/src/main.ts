/** App entry: wires the client against a running review service. */

import { ApiClient } from "./api.js";
import { renderAnalytics } from "./analytics.js";
import { renderRecommendationBanner } from "./banner.js";
import { SessionFlow } from "./session.js";
import { showToast } from "./toast.js";

export function mountApp(root: HTMLElement, base = "", reviewerId = "anonymous"): void {
  const api = new ApiClient(base, reviewerId);
  root.replaceChildren();

  const nav = document.createElement("nav");
  const slidePanel = document.createElement("section");
  slidePanel.id = "slide-panel";
  const sessionPanel = document.createElement("section");
  sessionPanel.id = "session-panel";
  const analyticsPanel = document.createElement("section");
  analyticsPanel.id = "analytics-panel";
  root.append(nav, slidePanel, sessionPanel, analyticsPanel);

  const slideForm = document.createElement("form");
  const slideInput = document.createElement("input");
  slideInput.placeholder = "slide id";
  const slideGo = document.createElement("button");
  slideGo.textContent = "Recommendation";
  slideForm.append(slideInput, slideGo);
  slideForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      const rec = await api.recommendation(slideInput.value.trim());
      slidePanel.replaceChildren(renderRecommendationBanner(rec));
    } catch (error) {
      showToast(slidePanel, String(error));
    }
  });
  nav.appendChild(slideForm);

  const sessionForm = document.createElement("form");
  const sessionInput = document.createElement("input");
  sessionInput.placeholder = "case ids, comma separated";
  const sessionGo = document.createElement("button");
  sessionGo.textContent = "Start blinded session";
  sessionForm.append(sessionInput, sessionGo);
  sessionForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      const caseIds = sessionInput.value.split(",").map((s) => s.trim()).filter(Boolean);
      const summary = await api.createSession({
        case_ids: caseIds,
        n_decoys: 12,
        seed: Date.now() % 100000,
        blinded: true,
      });
      const flow = new SessionFlow(api, summary.session_id, sessionPanel, summary.blinded);
      await flow.start();
    } catch (error) {
      showToast(sessionPanel, String(error));
    }
  });
  nav.appendChild(sessionForm);

  const cohortForm = document.createElement("form");
  const cohortInput = document.createElement("input");
  cohortInput.placeholder = "cohort id";
  const cohortGo = document.createElement("button");
  cohortGo.textContent = "Analytics";
  cohortForm.append(cohortInput, cohortGo);
  cohortForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      renderAnalytics(await api.cohortReport(cohortInput.value.trim()), analyticsPanel);
    } catch {
      renderAnalytics(null, analyticsPanel);
    }
  });
  nav.appendChild(cohortForm);
}

declare global {
  interface Window {
    mountIhcTriage?: typeof mountApp;
  }
}

if (typeof window !== "undefined") {
  window.mountIhcTriage = mountApp;
}
