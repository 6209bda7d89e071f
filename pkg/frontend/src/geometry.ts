// Viewport math for server-produced layouts. Coordinates arrive in the unit
// square; the client only scales and translates, never re-packs.

export interface Viewport {
  width: number;
  height: number;
}

export interface Transform {
  scale: number;
  dx: number;
  dy: number;
}

/** Map the unit square onto the shorter viewport dimension, centered. */
export function unitTransform(vp: Viewport): Transform {
  const scale = Math.min(vp.width, vp.height);
  return {
    scale,
    dx: (vp.width - scale) / 2,
    dy: (vp.height - scale) / 2,
  };
}

export function applyPoint(t: Transform, x: number, y: number): { x: number; y: number } {
  return { x: t.dx + x * t.scale, y: t.dy + y * t.scale };
}

export function applyRadius(t: Transform, r: number): number {
  return r * t.scale;
}

/**
 * Affine blend between two transforms. Zoom animation interpolates the
 * previous and next server layouts; there is no client-side re-layout.
 */
export function lerpTransform(a: Transform, b: Transform, t: number): Transform {
  const u = Math.max(0, Math.min(1, t));
  return {
    scale: a.scale + (b.scale - a.scale) * u,
    dx: a.dx + (b.dx - a.dx) * u,
    dy: a.dy + (b.dy - a.dy) * u,
  };
}

/**
 * Transform that shows the circle (x, y, r) filling the unit square, given
 * the base transform that shows the whole square. This is where an entered
 * circle ends up after the server re-roots the layout on it.
 */
export function zoomTransform(
  base: Transform,
  x: number,
  y: number,
  r: number,
): Transform {
  const k = 0.5 / r;
  return {
    scale: base.scale * k,
    dx: base.scale * (0.5 - x * k) + base.dx,
    dy: base.scale * (0.5 - y * k) + base.dy,
  };
}

/** Pixel-space transform that re-shows a layout drawn at `from` as if at `to`. */
export function overlayTransform(from: Transform, to: Transform): Transform {
  const scale = to.scale / from.scale;
  return {
    scale,
    dx: to.dx - scale * from.dx,
    dy: to.dy - scale * from.dy,
  };
}

export function toCss(t: Transform): string {
  return `translate(${t.dx}px, ${t.dy}px) scale(${t.scale})`;
}
