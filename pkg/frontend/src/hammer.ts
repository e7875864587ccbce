/** Hammer equal-area projection and the curved-map angle remap. */

import { DEG, GeoCoord } from './geo.js'

export const HAMMER_HALF_WIDTH = 2 * Math.SQRT2
export const HAMMER_HALF_HEIGHT = Math.SQRT2

export const CURVED_H_SPAN = 108
export const CURVED_V_SPAN = 54

export interface MapPoint {
  x: number
  y: number
}

export function hammerForward(g: GeoCoord): MapPoint {
  const lam = g.lon * DEG
  const phi = g.lat * DEG
  const cphi = Math.cos(phi)
  const chl = Math.cos(lam / 2)
  const d = Math.sqrt(1 + cphi * chl)
  return {
    x: (2 * Math.SQRT2 * cphi * Math.sin(lam / 2)) / d,
    y: (Math.SQRT2 * Math.sin(phi)) / d,
  }
}

export function inHammerEllipse(x: number, y: number, tol = 1e-9): boolean {
  return (x * x) / 8 + (y * y) / 2 <= 1 + tol
}

/** Closed-form inverse; returns null outside the ellipse. */
export function hammerInverse(m: MapPoint): GeoCoord | null {
  if (!inHammerEllipse(m.x, m.y)) return null
  const z2 = 1 - (m.x * m.x) / 16 - (m.y * m.y) / 4
  const z = Math.sqrt(Math.max(z2, 0))
  const lat = Math.asin(Math.min(1, Math.max(-1, z * m.y))) / DEG
  const lon = (2 * Math.atan2(z * m.x, 2 * (2 * z2 - 1))) / DEG
  return { lon: Math.min(180, Math.max(-180, lon)), lat }
}

/** Linear map of the Hammer plane onto the curved map's angle box (degrees). */
export function curvedRemap(m: MapPoint): { ah: number; av: number } | null {
  if (!inHammerEllipse(m.x, m.y)) return null
  return {
    ah: (m.x / HAMMER_HALF_WIDTH) * (CURVED_H_SPAN / 2),
    av: (m.y / HAMMER_HALF_HEIGHT) * (CURVED_V_SPAN / 2),
  }
}
