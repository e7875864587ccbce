/**
 * Analytic ray/surface intersection for the four scenes, mapped back to
 * geographic coordinates through the inverse embedding. No renderer types
 * here so the picking math stays unit-testable.
 */

import { GeoCoord, Rotation, Vec3, dot, inverseRotateGeo, norm } from './geo.js'
import {
  CURVED_H_SPAN, CURVED_RADIUS, CURVED_V_SPAN, EGO_CENTER, EGO_RADIUS,
  EXO_CENTER, EXO_RADIUS, FLAT_CENTER, FLAT_HEIGHT, FLAT_WIDTH,
  SceneKind, solveRecenter, surfaceToRotatedGeo,
} from './scenes.js'

export interface Ray {
  origin: Vec3
  dir: Vec3 // need not be normalized
}

export interface Pick {
  geo: GeoCoord       // geographic coords (rotation removed)
  world: Vec3         // surface hit point
  distance: number    // metres along the ray
}

function raySphere(ray: Ray, center: Vec3, radius: number, inside: boolean): number | null {
  const o: Vec3 = [
    ray.origin[0] - center[0],
    ray.origin[1] - center[1],
    ray.origin[2] - center[2],
  ]
  const d = ray.dir
  const a = dot(d, d)
  const b = 2 * dot(o, d)
  const c = dot(o, o) - radius * radius
  const disc = b * b - 4 * a * c
  if (disc < 0) return null
  const sq = Math.sqrt(disc)
  const t1 = (-b - sq) / (2 * a)
  const t2 = (-b + sq) / (2 * a)
  if (inside) return t2 > 1e-9 ? t2 : null // from inside, exit point
  return t1 > 1e-9 ? t1 : null             // from outside, near face
}

function at(ray: Ray, t: number): Vec3 {
  return [
    ray.origin[0] + t * ray.dir[0],
    ray.origin[1] + t * ray.dir[1],
    ray.origin[2] + t * ray.dir[2],
  ]
}

/** Nearest ray/surface hit for the active scene, or null on a miss. */
export function pick(kind: SceneKind, rotation: Rotation, ray: Ray): Pick | null {
  let t: number | null = null
  switch (kind) {
    case 'exocentric':
      t = raySphere(ray, EXO_CENTER, EXO_RADIUS, false)
      break
    case 'egocentric': {
      const o: Vec3 = [
        ray.origin[0] - EGO_CENTER[0],
        ray.origin[1] - EGO_CENTER[1],
        ray.origin[2] - EGO_CENTER[2],
      ]
      t = raySphere(ray, EGO_CENTER, EGO_RADIUS, norm(o) < EGO_RADIUS)
      break
    }
    case 'flat': {
      if (Math.abs(ray.dir[2]) < 1e-12) return null
      const tz = (FLAT_CENTER[2] - ray.origin[2]) / ray.dir[2]
      if (tz <= 1e-9) return null
      const p = at(ray, tz)
      if (Math.abs(p[0] - FLAT_CENTER[0]) > FLAT_WIDTH / 2) return null
      if (Math.abs(p[1] - FLAT_CENTER[1]) > FLAT_HEIGHT / 2) return null
      t = tz
      break
    }
    case 'curved': {
      const tc = raySphere(ray, [0, 0, 0], CURVED_RADIUS,
        norm(ray.origin) < CURVED_RADIUS)
      if (tc === null) return null
      const p = at(ray, tc)
      const ah = Math.atan2(p[0], -p[2]) * (180 / Math.PI)
      const av = Math.asin(Math.min(1, Math.max(-1, p[1] / CURVED_RADIUS))) * (180 / Math.PI)
      if (Math.abs(ah) > CURVED_H_SPAN / 2 || Math.abs(av) > CURVED_V_SPAN / 2) return null
      t = tc
      break
    }
  }
  if (t === null) return null
  const world = at(ray, t)
  const rotated = surfaceToRotatedGeo(kind, world)
  if (!rotated) return null
  return { geo: inverseRotateGeo(rotation, rotated), world, distance: t * norm(ray.dir) }
}

/**
 * One step of a drag: keep the grabbed geographic point under the pointer
 * ray. Returns the current rotation unchanged while the ray misses the
 * surface or the target is unreachable (the drag is suspended, not
 * cancelled).
 */
export function dragUpdate(
  kind: SceneKind, rotation: Rotation, grabbed: GeoCoord, ray: Ray,
): Rotation {
  const hit = pick(kind, rotation, ray)
  if (!hit) return rotation
  return solveRecenter(kind, rotation, grabbed, hit.world) ?? rotation
}
