/**
 * World-space embeddings of the four visualisations, the drag-to-recenter
 * solver, and the flat-map/globe morph. World coordinates are metres,
 * right-handed, y-up, viewer's head at the origin gazing along -z.
 *
 * This is an independent implementation of the toolkit's scene math; the
 * golden-vector test suite holds it to the reference within 1e-6 m.
 */

import {
  DEG, GeoCoord, Rotation, Vec3,
  applyMat, rotationMatrix, toGeo, toVec, traceProduct, wrapLon,
} from './geo.js'
import {
  CURVED_H_SPAN, CURVED_V_SPAN, HAMMER_HALF_HEIGHT, HAMMER_HALF_WIDTH,
  curvedRemap, hammerForward, hammerInverse,
} from './hammer.js'

export { CURVED_H_SPAN, CURVED_V_SPAN } from './hammer.js'

export type SceneKind = 'exocentric' | 'flat' | 'egocentric' | 'curved'

export const SCENE_KINDS: SceneKind[] = ['exocentric', 'flat', 'egocentric', 'curved']

export const EXO_RADIUS = 0.4
export const EXO_CENTER: Vec3 = [0, 0, -1]
export const FLAT_WIDTH = 1.0
export const FLAT_HEIGHT = 0.5
export const FLAT_CENTER: Vec3 = [0, 0, -1]
export const FLAT_PLANE_SCALE = FLAT_WIDTH / (2 * HAMMER_HALF_WIDTH)
export const EGO_RADIUS = 8.0
export const EGO_VIEWER_FRACTION = 0.8
export const EGO_CENTER: Vec3 = [0, 0, -EGO_VIEWER_FRACTION * EGO_RADIUS]
export const CURVED_RADIUS = 1.0

/** Sphere-surface direction for rotated geo coords: east right, north up,
 * (0,0) toward zSign * z. */
function sphereDir(lon: number, lat: number, zSign: number): Vec3 {
  const lam = lon * DEG
  const phi = lat * DEG
  const c = Math.cos(phi)
  return [c * Math.sin(lam), Math.sin(phi), zSign * c * Math.cos(lam)]
}

function embedRotated(kind: SceneKind, g: GeoCoord): Vec3 | null {
  switch (kind) {
    case 'exocentric': {
      const d = sphereDir(g.lon, g.lat, 1)
      return [
        EXO_CENTER[0] + EXO_RADIUS * d[0],
        EXO_CENTER[1] + EXO_RADIUS * d[1],
        EXO_CENTER[2] + EXO_RADIUS * d[2],
      ]
    }
    case 'flat': {
      const m = hammerForward(g)
      return [
        FLAT_CENTER[0] + FLAT_PLANE_SCALE * m.x,
        FLAT_CENTER[1] + FLAT_PLANE_SCALE * m.y,
        FLAT_CENTER[2],
      ]
    }
    case 'egocentric': {
      // Inner surface: mirrored z so the map reads east-right from inside.
      const d = sphereDir(g.lon, g.lat, -1)
      return [
        EGO_CENTER[0] + EGO_RADIUS * d[0],
        EGO_CENTER[1] + EGO_RADIUS * d[1],
        EGO_CENTER[2] + EGO_RADIUS * d[2],
      ]
    }
    case 'curved': {
      const m = hammerForward(g)
      const r = curvedRemap(m)
      if (!r) return null
      const ah = r.ah * DEG
      const av = r.av * DEG
      const ca = Math.cos(av)
      return [
        CURVED_RADIUS * ca * Math.sin(ah),
        CURVED_RADIUS * Math.sin(av),
        -CURVED_RADIUS * ca * Math.cos(ah),
      ]
    }
  }
}

/** World position of a geographic point under a scene's rotation. */
export function embed(kind: SceneKind, rotation: Rotation, g: GeoCoord): Vec3 {
  const rotated = toGeo(applyMat(rotationMatrix(rotation), toVec(g)))
  const p = embedRotated(kind, rotated)
  if (!p) throw new Error(`point (${g.lon}, ${g.lat}) outside the projection`)
  return p
}

/** Rotated-frame geo coords of a point on the scene surface (null if the
 * point cannot be expressed in the projected domain). */
export function surfaceToRotatedGeo(kind: SceneKind, p: Vec3): GeoCoord | null {
  switch (kind) {
    case 'exocentric': {
      const d: Vec3 = [
        (p[0] - EXO_CENTER[0]) / EXO_RADIUS,
        (p[1] - EXO_CENTER[1]) / EXO_RADIUS,
        (p[2] - EXO_CENTER[2]) / EXO_RADIUS,
      ]
      return dirToGeo(d, 1)
    }
    case 'egocentric': {
      const d: Vec3 = [
        (p[0] - EGO_CENTER[0]) / EGO_RADIUS,
        (p[1] - EGO_CENTER[1]) / EGO_RADIUS,
        (p[2] - EGO_CENTER[2]) / EGO_RADIUS,
      ]
      return dirToGeo(d, -1)
    }
    case 'flat':
      return hammerInverse({
        x: (p[0] - FLAT_CENTER[0]) / FLAT_PLANE_SCALE,
        y: (p[1] - FLAT_CENTER[1]) / FLAT_PLANE_SCALE,
      })
    case 'curved': {
      const av = Math.asin(Math.min(1, Math.max(-1, p[1] / CURVED_RADIUS))) / DEG
      const ah = Math.atan2(p[0], -p[2]) / DEG
      return hammerInverse({
        x: (ah / (CURVED_H_SPAN / 2)) * HAMMER_HALF_WIDTH,
        y: (av / (CURVED_V_SPAN / 2)) * HAMMER_HALF_HEIGHT,
      })
    }
  }
}

function dirToGeo(d: Vec3, zSign: number): GeoCoord {
  return {
    lat: Math.asin(Math.min(1, Math.max(-1, d[1]))) / DEG,
    lon: wrapLon(Math.atan2(d[0], zSign * d[2]) / DEG),
  }
}

/**
 * Rotation that puts `grabbed` at the surface point `target`, keeping the
 * current roll (dragging never spins the frame). Returns null when the
 * target is outside the projected domain or unreachable with this roll.
 */
export function solveRecenter(
  kind: SceneKind, current: Rotation, grabbed: GeoCoord, target: Vec3,
): Rotation | null {
  const tHat = surfaceToRotatedGeo(kind, target)
  if (!tHat) return null
  const gr = current.gamma * DEG
  const cg = Math.cos(gr)
  const sg = Math.sin(gr)
  const vt = toVec(tHat)
  // Peel the roll off: solve Ry(-phi) Rz(lam) v_g = Rx(-gamma) v_t.
  const w: Vec3 = [vt[0], cg * vt[1] + sg * vt[2], -sg * vt[1] + cg * vt[2]]
  const vg = toVec(grabbed)
  const cosA = Math.hypot(vg[0], vg[1])
  const lamG = Math.atan2(vg[1], vg[0])
  if (Math.abs(w[1]) > cosA + 1e-12) return null
  const s = cosA > 0 ? Math.min(1, Math.max(-1, w[1] / cosA)) : 0
  const uxMag = Math.sqrt(Math.max(0, cosA * cosA - w[1] * w[1]))
  const uz = vg[2]
  const candidates: Rotation[] = []
  for (const [sigma, ux] of [
    [Math.asin(s), uxMag],
    [Math.PI - Math.asin(s), -uxMag],
  ] as [number, number][]) {
    const lam = (sigma - lamG) / DEG
    const phi = Math.hypot(ux, uz) < 1e-12
      ? current.phi
      : Math.atan2(w[2] * ux - w[0] * uz, w[0] * ux + w[2] * uz) / DEG
    candidates.push({ lam: wrapLon(lam), phi: wrapLon(phi), gamma: current.gamma })
  }
  const cur = rotationMatrix(current)
  let best = candidates[0]
  let bestScore = -Infinity
  for (const c of candidates) {
    const score = traceProduct(rotationMatrix(c), cur)
    if (score > bestScore) {
      best = c
      bestScore = score
    }
  }
  return best
}

/** Linear world-space morph between the flat map (t=0) and the exocentric
 * globe (t=1); endpoints reproduce the embeddings exactly. */
export function morphPoint(t: number, g: GeoCoord, rotation: Rotation): Vec3 {
  if (t <= 0) return embed('flat', rotation, g)
  if (t >= 1) return embed('exocentric', rotation, g)
  const a = embed('flat', rotation, g)
  const b = embed('exocentric', rotation, g)
  return [
    (1 - t) * a[0] + t * b[0],
    (1 - t) * a[1] + t * b[1],
    (1 - t) * a[2] + t * b[2],
  ]
}

/** Static world-space horizon rings on the egocentric sphere; pure function
 * of the sphere dimensions, never of the rotation. */
export function horizonRings(elevationsDeg: number[] = [-30, 30], samples = 256): Vec3[][] {
  return elevationsDeg.map((e) => {
    const er = e * DEG
    const ring: Vec3[] = []
    for (let i = 0; i < samples; i++) {
      const t = (i / samples) * 2 * Math.PI
      ring.push([
        EGO_CENTER[0] + EGO_RADIUS * Math.cos(er) * Math.cos(t),
        EGO_CENTER[1] + EGO_RADIUS * Math.sin(er),
        EGO_CENTER[2] + EGO_RADIUS * Math.cos(er) * Math.sin(t),
      ])
    }
    return ring
  })
}

/** Graticule polylines in geographic coordinates (parallels pre-densified,
 * meridians pole to pole), with the equator flagged. */
export interface GraticuleLine {
  points: GeoCoord[]
  kind: 'meridian' | 'parallel'
  emphasized: boolean
}

export function graticule(spacing = 10, step = 2): GraticuleLine[] {
  const lines: GraticuleLine[] = []
  for (let lon = -180; lon < 180; lon += spacing) {
    const pts: GeoCoord[] = []
    for (let lat = -90; lat <= 90; lat += step) pts.push({ lon, lat })
    lines.push({ points: pts, kind: 'meridian', emphasized: false })
  }
  for (let lat = -90 + spacing; lat < 90; lat += spacing) {
    const pts: GeoCoord[] = []
    for (let lon = -180; lon <= 180; lon += step) pts.push({ lon, lat })
    lines.push({ points: pts, kind: 'parallel', emphasized: lat === 0 })
  }
  return lines
}
