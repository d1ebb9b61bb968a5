/** Recommendation banner: verdict, probability, and operating threshold. */

import type { Recommendation } from "./types.js";

export const RECOMMENDED_TEXT = "IHC analysis recommended";
export const NOT_RECOMMENDED_TEXT = "IHC analysis not recommended";

export function renderRecommendationBanner(rec: Recommendation): HTMLElement {
  const banner = document.createElement("div");
  banner.className =
    rec.verdict === "ihc_recommended"
      ? "banner banner-recommended"
      : "banner banner-not-recommended";
  banner.dataset.verdict = rec.verdict;
  banner.dataset.probability = String(rec.cancer_probability);
  banner.dataset.threshold = String(rec.operating_threshold);

  const headline = document.createElement("strong");
  headline.textContent =
    rec.verdict === "ihc_recommended" ? RECOMMENDED_TEXT : NOT_RECOMMENDED_TEXT;
  banner.appendChild(headline);

  const detail = document.createElement("span");
  detail.className = "banner-detail";
  detail.textContent =
    ` cancer probability ${rec.cancer_probability.toFixed(4)}` +
    ` at threshold ${rec.operating_threshold}`;
  banner.appendChild(detail);

  if (rec.final_isup !== null && rec.final_isup !== undefined) {
    const advisory = document.createElement("span");
    advisory.className = "banner-advisory";
    advisory.textContent = ` (advisory grade: ${rec.final_isup})`;
    banner.appendChild(advisory);
  }
  return banner;
}
