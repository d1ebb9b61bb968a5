/** Slide viewer with a geometrically registered heatmap overlay.
 *
 * Both image layers live inside one transformed wrapper, so any zoom/pan
 * applies identically to slide and overlay: overlay pixel (x, y) always
 * sits on slide coordinate (x, y) at the declared resolution. In blinded
 * mode the overlay is never loaded and its controls are disabled, not
 * merely hidden.
 */

export interface ViewerState {
  slideId: string;
  zoom: number;
  panX: number;
  panY: number;
  overlayOpacity: number;
  overlayVisible: boolean;
}

export class SlideViewer {
  readonly element: HTMLElement;
  readonly state: ViewerState;
  private readonly world: HTMLElement;
  private readonly slideLayer: HTMLImageElement;
  private readonly overlayLayer: HTMLImageElement;
  private readonly opacitySlider: HTMLInputElement;
  private readonly visibilityToggle: HTMLInputElement;
  readonly blinded: boolean;

  constructor(opts: {
    slideId: string;
    imageRef: string | null;
    heatmapRef: string | null;
    blinded: boolean;
  }) {
    this.blinded = opts.blinded;
    this.state = {
      slideId: opts.slideId,
      zoom: 1,
      panX: 0,
      panY: 0,
      overlayOpacity: 0.5,
      overlayVisible: !opts.blinded && opts.heatmapRef !== null,
    };

    this.element = document.createElement("div");
    this.element.className = "slide-viewer";

    this.world = document.createElement("div");
    this.world.className = "viewer-world";
    this.element.appendChild(this.world);

    this.slideLayer = document.createElement("img");
    this.slideLayer.className = "layer layer-slide";
    if (opts.imageRef) this.slideLayer.src = opts.imageRef;
    this.world.appendChild(this.slideLayer);

    this.overlayLayer = document.createElement("img");
    this.overlayLayer.className = "layer layer-overlay";
    if (!opts.blinded && opts.heatmapRef) {
      this.overlayLayer.src = opts.heatmapRef;
    }
    this.world.appendChild(this.overlayLayer);

    const controls = document.createElement("div");
    controls.className = "overlay-controls";
    this.opacitySlider = document.createElement("input");
    this.opacitySlider.type = "range";
    this.opacitySlider.min = "0";
    this.opacitySlider.max = "1";
    this.opacitySlider.step = "0.05";
    this.opacitySlider.value = String(this.state.overlayOpacity);
    this.opacitySlider.addEventListener("input", () => {
      this.setOverlayOpacity(Number(this.opacitySlider.value));
    });
    this.visibilityToggle = document.createElement("input");
    this.visibilityToggle.type = "checkbox";
    this.visibilityToggle.checked = this.state.overlayVisible;
    this.visibilityToggle.addEventListener("change", () => {
      this.setOverlayVisible(this.visibilityToggle.checked);
    });
    if (opts.blinded) {
      this.opacitySlider.disabled = true;
      this.visibilityToggle.disabled = true;
      this.visibilityToggle.checked = false;
    }
    controls.appendChild(this.visibilityToggle);
    controls.appendChild(this.opacitySlider);
    this.element.appendChild(controls);
    this.apply();
  }

  private apply(): void {
    this.world.style.transform =
      `translate(${this.state.panX}px, ${this.state.panY}px) scale(${this.state.zoom})`;
    this.world.style.transformOrigin = "0 0";
    this.overlayLayer.style.opacity = String(
      this.state.overlayVisible ? this.state.overlayOpacity : 0,
    );
  }

  setZoom(zoom: number): void {
    this.state.zoom = Math.max(zoom, 1e-6);
    this.apply();
  }

  setPan(x: number, y: number): void {
    this.state.panX = x;
    this.state.panY = y;
    this.apply();
  }

  setOverlayOpacity(opacity: number): void {
    if (this.blinded) return;
    this.state.overlayOpacity = Math.min(1, Math.max(0, opacity));
    this.apply();
  }

  setOverlayVisible(visible: boolean): void {
    if (this.blinded) return;
    this.state.overlayVisible = visible;
    this.apply();
  }

  /** Screen position of a slide coordinate under the current view. */
  slideToScreen(x: number, y: number): { x: number; y: number } {
    return {
      x: this.state.panX + x * this.state.zoom,
      y: this.state.panY + y * this.state.zoom,
    };
  }

  /** Both layers share one transform; exposed for registration checks. */
  layerTransforms(): { slide: string; overlay: string } {
    const shared = this.world.style.transform;
    return { slide: shared, overlay: shared };
  }
}
