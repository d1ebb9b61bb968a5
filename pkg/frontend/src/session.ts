/** Session flow: advance case by case, submit decisions, then finalize.
 *
 * The banner and heatmap overlay appear only when the service sent AI
 * fields (unblinded sessions); in blinded sessions the case payload has
 * none, so nothing AI-derived can reach the document. Refreshing simply
 * re-asks the service for the next undecided case.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderRecommendationBanner } from "./banner.js";
import { createDecisionForm } from "./decisionForm.js";
import { showToast } from "./toast.js";
import { SlideViewer } from "./viewer.js";
import type { CaseView, ConcordanceReport } from "./types.js";

export class SessionFlow {
  private current: CaseView | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    private readonly container: HTMLElement,
    private readonly blinded: boolean,
  ) {}

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    const response = await this.api.nextCase(this.sessionId);
    if (response.done || response.case === null) {
      this.current = null;
      this.renderFinalizePrompt();
      return;
    }
    this.current = response.case;
    this.renderCase(response.case);
  }

  private renderCase(view: CaseView): void {
    this.container.replaceChildren();

    const progress = document.createElement("div");
    progress.className = "progress";
    progress.textContent = `Case ${view.position} / ${view.total}`;
    this.container.appendChild(progress);

    if (view.ai) {
      this.container.appendChild(
        renderRecommendationBanner({
          slide_id: view.case_id,
          cancer_probability: view.ai.cancer_probability,
          operating_threshold: 0,
          verdict: view.ai.verdict,
          heatmap_ref: view.ai.heatmap_ref,
          final_isup: view.ai.final_isup,
        }),
      );
    }

    const viewer = new SlideViewer({
      slideId: view.case_id,
      imageRef: view.image_ref,
      heatmapRef: view.ai?.heatmap_ref ?? null,
      blinded: this.blinded || !view.ai,
    });
    this.container.appendChild(viewer.element);

    const form = createDecisionForm(async (value) => {
      try {
        await this.api.submitDecision(this.sessionId, {
          case_id: view.case_id,
          ...value,
        });
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          await this.advance(); // reconcile with the server's view
          showToast(this.container, `Decision conflict: ${error.detail}`);
          return;
        }
        showToast(this.container, `Could not submit: ${String(error)}`);
        return;
      }
      await this.advance();
    });
    this.container.appendChild(form);
  }

  private renderFinalizePrompt(): void {
    this.container.replaceChildren();
    const done = document.createElement("div");
    done.className = "session-done";
    done.textContent = "All cases decided.";
    this.container.appendChild(done);

    const finalize = document.createElement("button");
    finalize.type = "button";
    finalize.className = "finalize";
    finalize.textContent = "Finalize session";
    finalize.addEventListener("click", async () => {
      try {
        const report = await this.api.finalize(this.sessionId);
        this.renderConcordance(report);
      } catch (error) {
        showToast(this.container, `Could not finalize: ${String(error)}`);
      }
    });
    this.container.appendChild(finalize);
  }

  private renderConcordance(report: ConcordanceReport): void {
    this.container.replaceChildren();
    const heading = document.createElement("h2");
    heading.textContent = `Concordance report (${report.n_decided}/${report.n_cases} decided)`;
    this.container.appendChild(heading);

    const table = document.createElement("table");
    table.className = "concordance";
    const addRow = (values: string[], tag: "td" | "th") => {
      const tr = document.createElement("tr");
      for (const value of values) {
        const cell = document.createElement(tag);
        cell.textContent = value;
        tr.appendChild(cell);
      }
      table.appendChild(tr);
    };
    addRow(["Case", "Decoy", "Reference", "Diagnosis", "IHC", "AI verdict", "AI p"], "th");
    for (const row of report.cases) {
      addRow(
        [
          row.case_id,
          row.is_decoy ? "yes" : "no",
          String(row.reference_class ?? "-"),
          row.diagnosis ?? "-",
          row.ihc_required === null ? "-" : row.ihc_required ? "yes" : "no",
          row.ai_verdict,
          row.ai_probability.toFixed(4),
        ],
        "td",
      );
    }
    this.container.appendChild(table);
  }

  currentCase(): CaseView | null {
    return this.current;
  }
}
