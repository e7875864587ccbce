/**
 * Spherical geometry on the unit sphere. Mirrors the toolkit conventions:
 * degrees at the boundary, unit vectors inside, x toward lon 0 / lat 0,
 * y toward lon 90, z toward the north pole.
 */

export interface GeoCoord {
  lon: number
  lat: number
}

export interface Rotation {
  lam: number
  phi: number
  gamma: number
}

export type Vec3 = [number, number, number]
/** Row-major 3x3 matrix. */
export type Mat3 = [number, number, number, number, number, number, number, number, number]

export const DEG = Math.PI / 180

export const IDENTITY_ROTATION: Rotation = { lam: 0, phi: 0, gamma: 0 }

export function wrapLon(lon: number): number {
  let x = lon % 360
  if (x > 180) x -= 360
  else if (x <= -180) x += 360
  return x
}

export function toVec(g: GeoCoord): Vec3 {
  const lam = g.lon * DEG
  const phi = g.lat * DEG
  const c = Math.cos(phi)
  return [c * Math.cos(lam), c * Math.sin(lam), Math.sin(phi)]
}

export function toGeo(v: Vec3): GeoCoord {
  const hyp = Math.hypot(v[0], v[1])
  if (hyp < 1e-12) return { lon: 0, lat: v[2] > 0 ? 90 : -90 }
  return {
    lon: Math.atan2(v[1], v[0]) / DEG,
    lat: Math.atan2(v[2], hyp) / DEG,
  }
}

export function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ]
}

export function norm(v: Vec3): number {
  return Math.hypot(v[0], v[1], v[2])
}

export function normalize(v: Vec3): Vec3 {
  const n = norm(v)
  return [v[0] / n, v[1] / n, v[2] / n]
}

/**
 * Rotation matrix for the three-angle frame rotation: lam about the polar
 * axis (adds to longitudes), then phi about the view's horizontal axis,
 * then gamma rolling about the view axis. Carries (-lam, -phi) to (0, 0).
 */
export function rotationMatrix(r: Rotation): Mat3 {
  const l = r.lam * DEG, p = r.phi * DEG, g = r.gamma * DEG
  const cl = Math.cos(l), sl = Math.sin(l)
  const cp = Math.cos(p), sp = Math.sin(p)
  const cg = Math.cos(g), sg = Math.sin(g)
  // Rx(gamma) * Ry(-phi) * Rz(lam), row-major.
  return [
    cp * cl, -cp * sl, -sp,
    cg * sl - sg * sp * cl, cg * cl + sg * sp * sl, -sg * cp,
    sg * sl + cg * sp * cl, sg * cl - cg * sp * sl, cg * cp,
  ]
}

export function applyMat(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
    m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
    m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
  ]
}

export function applyMatTransposed(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0] * v[0] + m[3] * v[1] + m[6] * v[2],
    m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
    m[2] * v[0] + m[5] * v[1] + m[8] * v[2],
  ]
}

export function rotateGeo(r: Rotation, g: GeoCoord): GeoCoord {
  return toGeo(applyMat(rotationMatrix(r), toVec(g)))
}

export function inverseRotateGeo(r: Rotation, g: GeoCoord): GeoCoord {
  return toGeo(applyMatTransposed(rotationMatrix(r), toVec(g)))
}

/** trace(A * B^T) — a similarity score between two rotation matrices. */
export function traceProduct(a: Mat3, b: Mat3): number {
  let t = 0
  for (let i = 0; i < 9; i++) t += a[i] * b[i]
  return t
}

export function greatCircleDistance(a: GeoCoord, b: GeoCoord): number {
  const va = toVec(a), vb = toVec(b)
  return Math.atan2(norm(cross(va, vb)), dot(va, vb)) / DEG
}

/** Point `dist` degrees from `start` along `bearing` (clockwise from north). */
export function destination(start: GeoCoord, bearing: number, dist: number): GeoCoord {
  const v = toVec(start)
  const east = normalize(cross([0, 0, 1], v))
  const north = cross(v, east)
  const b = bearing * DEG
  const d = dist * DEG
  const t: Vec3 = [
    Math.cos(b) * north[0] + Math.sin(b) * east[0],
    Math.cos(b) * north[1] + Math.sin(b) * east[1],
    Math.cos(b) * north[2] + Math.sin(b) * east[2],
  ]
  return toGeo([
    Math.cos(d) * v[0] + Math.sin(d) * t[0],
    Math.cos(d) * v[1] + Math.sin(d) * t[1],
    Math.cos(d) * v[2] + Math.sin(d) * t[2],
  ])
}
