// Dual-pane pan/zoom with synchronized navigation, so corresponding tissue
// regions stay aligned between the H&E and Sox10 images.

export interface Transform {
  scale: number;
  tx: number;
  ty: number;
}

const MIN_SCALE = 0.25;
const MAX_SCALE = 32;

export class PanZoomPane {
  transform: Transform = { scale: 1, tx: 0, ty: 0 };

  constructor(
    readonly container: HTMLElement,
    readonly content: HTMLElement,
  ) {
    content.style.transformOrigin = '0 0';
    this.apply();
  }

  apply(): void {
    const { scale, tx, ty } = this.transform;
    this.content.style.transform = `translate(${tx}px, ${ty}px) scale(${scale})`;
  }

  setTransform(t: Transform): void {
    this.transform = { ...t };
    this.apply();
  }

  panBy(dx: number, dy: number): void {
    this.transform.tx += dx;
    this.transform.ty += dy;
    this.apply();
  }

  /** Zoom by a factor keeping the pane point (cx, cy) fixed. */
  zoomAt(factor: number, cx: number, cy: number): void {
    const t = this.transform;
    const next = Math.min(MAX_SCALE, Math.max(MIN_SCALE, t.scale * factor));
    const applied = next / t.scale;
    t.tx = cx - (cx - t.tx) * applied;
    t.ty = cy - (cy - t.ty) * applied;
    t.scale = next;
    this.apply();
  }

  reset(): void {
    this.setTransform({ scale: 1, tx: 0, ty: 0 });
  }
}

export class SyncedViewer {
  readonly left: PanZoomPane;
  readonly right: PanZoomPane;
  private synced = true;
  private dragging: { pane: PanZoomPane; x: number; y: number } | null = null;

  constructor(leftPane: PanZoomPane, rightPane: PanZoomPane) {
    this.left = leftPane;
    this.right = rightPane;
    this.wire(this.left);
    this.wire(this.right);
  }

  isSynced(): boolean {
    return this.synced;
  }

  setSynced(value: boolean): void {
    this.synced = value;
    if (value) this.right.setTransform(this.left.transform);
  }

  private peers(pane: PanZoomPane): PanZoomPane[] {
    if (!this.synced) return [pane];
    return [this.left, this.right];
  }

  panBy(pane: PanZoomPane, dx: number, dy: number): void {
    for (const p of this.peers(pane)) p.panBy(dx, dy);
  }

  zoomAt(pane: PanZoomPane, factor: number, cx: number, cy: number): void {
    for (const p of this.peers(pane)) p.zoomAt(factor, cx, cy);
  }

  reset(): void {
    this.left.reset();
    this.right.reset();
  }

  private wire(pane: PanZoomPane): void {
    const el = pane.container;
    el.addEventListener('wheel', (ev: WheelEvent) => {
      ev.preventDefault();
      const rect = el.getBoundingClientRect();
      const factor = ev.deltaY < 0 ? 1.2 : 1 / 1.2;
      this.zoomAt(pane, factor, ev.clientX - rect.left, ev.clientY - rect.top);
    });
    el.addEventListener('pointerdown', (ev: PointerEvent) => {
      this.dragging = { pane, x: ev.clientX, y: ev.clientY };
    });
    el.addEventListener('pointermove', (ev: PointerEvent) => {
      if (this.dragging === null || this.dragging.pane !== pane) return;
      this.panBy(pane, ev.clientX - this.dragging.x, ev.clientY - this.dragging.y);
      this.dragging = { pane, x: ev.clientX, y: ev.clientY };
    });
    const stop = () => {
      this.dragging = null;
    };
    el.addEventListener('pointerup', stop);
    el.addEventListener('pointerleave', stop);
  }
}
