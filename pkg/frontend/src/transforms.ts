// Mapping between canvas (CSS pixel) coordinates and master-clip pixels.
// The clip is letterboxed into the canvas: uniform scale, centered.

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
  clipWidth: number;
  clipHeight: number;
}

export function fitTransform(
  canvasWidth: number,
  canvasHeight: number,
  clipWidth: number,
  clipHeight: number,
): ViewTransform {
  const scale = Math.min(canvasWidth / clipWidth, canvasHeight / clipHeight);
  return {
    scale,
    offsetX: (canvasWidth - clipWidth * scale) / 2,
    offsetY: (canvasHeight - clipHeight * scale) / 2,
    clipWidth,
    clipHeight,
  };
}

/** Canvas point -> clip pixels, or null when outside the drawn clip area. */
export function canvasToClip(
  t: ViewTransform,
  px: number,
  py: number,
): { x: number; y: number } | null {
  const x = (px - t.offsetX) / t.scale;
  const y = (py - t.offsetY) / t.scale;
  if (x < 0 || y < 0 || x > t.clipWidth || y > t.clipHeight) {
    return null;
  }
  return { x, y };
}

export function clipToCanvas(
  t: ViewTransform,
  x: number,
  y: number,
): { x: number; y: number } {
  return { x: t.offsetX + x * t.scale, y: t.offsetY + y * t.scale };
}
