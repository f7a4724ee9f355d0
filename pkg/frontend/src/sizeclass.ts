import type { SizeClass } from './types.js';

// Must agree with the service's template-engine breakpoints.
export const NARROW_MAX_WIDTH = 320;
export const MEDIUM_MAX_WIDTH = 600;

export function sizeClassForWidth(widthPx: number): SizeClass {
  if (widthPx < NARROW_MAX_WIDTH) return 'narrow';
  if (widthPx < MEDIUM_MAX_WIDTH) return 'medium';
  return 'wide';
}
