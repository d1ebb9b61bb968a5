/** Diagnosis + IHC-required form; submit stays disabled until a diagnosis is chosen. */

import type { Diagnosis } from "./types.js";

export const DIAGNOSIS_OPTIONS: { value: Diagnosis; label: string }[] = [
  { value: "benign", label: "Benign" },
  { value: "atypia_sfc", label: "Atypia / suspicious for cancer" },
  { value: "isup_1", label: "ISUP 1" },
  { value: "isup_2", label: "ISUP 2" },
  { value: "isup_3", label: "ISUP 3" },
  { value: "isup_4", label: "ISUP 4" },
  { value: "isup_5", label: "ISUP 5" },
  { value: "suspicious_ductal", label: "Suspicious for ductal carcinoma" },
];

export interface DecisionFormValue {
  diagnosis: Diagnosis;
  ihc_required: boolean;
  note: string;
}

export function createDecisionForm(
  onSubmit: (value: DecisionFormValue) => void,
): HTMLFormElement {
  const form = document.createElement("form");
  form.className = "decision-form";

  const fieldset = document.createElement("fieldset");
  fieldset.className = "diagnosis-options";
  const legend = document.createElement("legend");
  legend.textContent = "Diagnosis";
  fieldset.appendChild(legend);
  for (const option of DIAGNOSIS_OPTIONS) {
    const label = document.createElement("label");
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "diagnosis";
    radio.value = option.value;
    label.appendChild(radio);
    label.appendChild(document.createTextNode(option.label));
    fieldset.appendChild(label);
  }
  form.appendChild(fieldset);

  const ihcLabel = document.createElement("label");
  ihcLabel.className = "ihc-required";
  const ihcToggle = document.createElement("input");
  ihcToggle.type = "checkbox";
  ihcToggle.name = "ihc_required";
  ihcLabel.appendChild(ihcToggle);
  ihcLabel.appendChild(document.createTextNode("IHC would be required"));
  form.appendChild(ihcLabel);

  const note = document.createElement("textarea");
  note.name = "note";
  note.placeholder = "Free-text note (optional)";
  form.appendChild(note);

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit decision";
  submit.disabled = true;
  form.appendChild(submit);

  form.addEventListener("change", () => {
    submit.disabled = selectedDiagnosis(form) === null;
  });
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const diagnosis = selectedDiagnosis(form);
    if (diagnosis === null) return;
    onSubmit({ diagnosis, ihc_required: ihcToggle.checked, note: note.value });
  });
  return form;
}

export function selectedDiagnosis(form: HTMLFormElement): Diagnosis | null {
  const checked = form.querySelector<HTMLInputElement>('input[name="diagnosis"]:checked');
  return checked ? (checked.value as Diagnosis) : null;
}
