/** Non-blocking error toasts; the case stays reviewable behind them. */

export function showToast(host: HTMLElement, message: string): HTMLElement {
  const toast = document.createElement("div");
  toast.className = "toast toast-error";
  toast.setAttribute("role", "alert");
  toast.textContent = message;
  const dismiss = document.createElement("button");
  dismiss.type = "button";
  dismiss.className = "toast-dismiss";
  dismiss.textContent = "x";
  dismiss.addEventListener("click", () => toast.remove());
  toast.appendChild(dismiss);
  host.appendChild(toast);
  return toast;
}
