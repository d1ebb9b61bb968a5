import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionFlow } from "../src/session.js";
import type { StoredDecision } from "../src/types.js";
import { FakeService } from "./fakeService.js";

async function flush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

function submitDiagnosis(container: HTMLElement, value: string, note = ""): void {
  const form = container.querySelector("form")!;
  const radio = form.querySelector<HTMLInputElement>(`input[value="${value}"]`)!;
  radio.checked = true;
  form.dispatchEvent(new Event("change", { bubbles: true }));
  const noteField = form.querySelector<HTMLTextAreaElement>("textarea")!;
  noteField.value = note;
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

describe("session flow", () => {
  beforeEach(() => document.body.replaceChildren());

  it("walks every case with a progress indicator and finalizes", async () => {
    const service = new FakeService(0.01);
    const api = new ApiClient("", "rev-1", service.fetch);
    const container = document.createElement("main");
    document.body.appendChild(container);
    const summary = await api.createSession({
      case_ids: ["slide-01", "slide-02", "slide-03"],
      n_decoys: 0,
      blinded: true,
    });
    const flow = new SessionFlow(api, summary.session_id, container, true);
    await flow.start();

    const seen: string[] = [];
    for (let i = 1; i <= 3; i++) {
      expect(container.querySelector(".progress")!.textContent).toBe(`Case ${i} / 3`);
      seen.push(flow.currentCase()!.case_id);
      submitDiagnosis(container, "benign");
      await flush();
    }
    expect(new Set(seen).size).toBe(3);
    expect(container.querySelector(".session-done")).not.toBeNull();

    container.querySelector<HTMLButtonElement>("button.finalize")!.dispatchEvent(new Event("click"));
    await flush();
    expect(container.querySelector("table.concordance")).not.toBeNull();
  });

  it("submit is disabled until a diagnosis is chosen", async () => {
    const service = new FakeService(0.01);
    const api = new ApiClient("", "rev-1", service.fetch);
    const container = document.createElement("main");
    document.body.appendChild(container);
    const summary = await api.createSession({ case_ids: ["slide-04"], blinded: true });
    await new SessionFlow(api, summary.session_id, container, true).start();
    const submit = container.querySelector<HTMLButtonElement>('button[type="submit"]')!;
    expect(submit.disabled).toBe(true);
    const radio = container.querySelector<HTMLInputElement>('input[value="isup_3"]')!;
    radio.checked = true;
    container.querySelector("form")!.dispatchEvent(new Event("change", { bubbles: true }));
    expect(submit.disabled).toBe(false);
  });

  it("a submitted decision round-trips unchanged", async () => {
    const service = new FakeService(0.01);
    const api = new ApiClient("", "rev-7", service.fetch);
    const container = document.createElement("main");
    document.body.appendChild(container);
    const summary = await api.createSession({ case_ids: ["slide-06"], blinded: true });
    const flow = new SessionFlow(api, summary.session_id, container, true);
    await flow.start();
    const caseId = flow.currentCase()!.case_id;
    submitDiagnosis(container, "isup_2", "left core, second fragment");
    await flush();

    const echoed = service.consumedBodies.find(
      (body): body is StoredDecision =>
        typeof body === "object" && body !== null && (body as StoredDecision).case_id === caseId
        && "diagnosis" in (body as object),
    )!;
    expect(echoed.diagnosis).toBe("isup_2");
    expect(echoed.ihc_required).toBe(false);
    expect(echoed.note).toBe("left core, second fragment");
    expect(echoed.reviewer_id).toBe("rev-7");

    // and the finalized report carries exactly what was submitted
    container.querySelector<HTMLButtonElement>("button.finalize")!.dispatchEvent(new Event("click"));
    await flush();
    const report = await api.sessionState(summary.session_id);
    expect(report.state).toBe("finalized");
    const row = container.querySelector("table.concordance tr:nth-child(2)")!;
    expect(row.textContent).toContain("isup_2");
  });

  it("resumes at the first undecided case after a refresh", async () => {
    const service = new FakeService(0.01);
    const api = new ApiClient("", "rev-1", service.fetch);
    const container = document.createElement("main");
    document.body.appendChild(container);
    const summary = await api.createSession({
      case_ids: ["slide-07", "slide-08", "slide-09"],
      blinded: true,
    });
    const flow = new SessionFlow(api, summary.session_id, container, true);
    await flow.start();
    const first = flow.currentCase()!.case_id;
    submitDiagnosis(container, "benign");
    await flush();
    const second = flow.currentCase()!.case_id;

    // "refresh": a brand-new flow instance over the same session
    const container2 = document.createElement("main");
    document.body.appendChild(container2);
    const resumed = new SessionFlow(api, summary.session_id, container2, true);
    await resumed.start();
    expect(resumed.currentCase()!.case_id).toBe(second);
    expect(resumed.currentCase()!.case_id).not.toBe(first);
    expect(container2.querySelector(".progress")!.textContent).toBe("Case 2 / 3");
  });

  it("surfaces duplicate submissions as a conflict and reconciles", async () => {
    const service = new FakeService(0.01);
    const api = new ApiClient("", "rev-1", service.fetch);
    const container = document.createElement("main");
    document.body.appendChild(container);
    const summary = await api.createSession({
      case_ids: ["slide-11", "slide-13"],
      blinded: true,
    });
    const flow = new SessionFlow(api, summary.session_id, container, true);
    await flow.start();
    const caseId = flow.currentCase()!.case_id;
    // another tab already decided this case
    await api.submitDecision(summary.session_id, {
      case_id: caseId,
      diagnosis: "benign",
      ihc_required: false,
      note: "",
    });
    submitDiagnosis(container, "isup_1");
    await flush();
    expect(container.querySelector(".toast-error")!.textContent).toContain("conflict");
    // reconciled by refetching: now showing the other case
    expect(flow.currentCase()!.case_id).not.toBe(caseId);
  });

  it("an empty session goes straight to the finalize prompt", async () => {
    const service = new FakeService(0.01);
    const api = new ApiClient("", "rev-1", service.fetch);
    const container = document.createElement("main");
    document.body.appendChild(container);
    const summary = await api.createSession({ case_ids: [], blinded: true });
    const flow = new SessionFlow(api, summary.session_id, container, true);
    await flow.start();
    expect(flow.currentCase()).toBeNull();
    expect(container.querySelector("button.finalize")).not.toBeNull();
  });
});
