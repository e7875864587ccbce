/**
 * Loading and display geometry for stimuli JSON emitted by the toolkit CLI
 * (`generate` / `session`). Schema errors raise with a readable message so
 * the UI can surface them.
 */

import { GeoCoord, destination } from './geo.js'

export interface StimulusEntry {
  family: 'distance' | 'area' | 'direction'
  difficulty: string
  truth: string
  separation: number
  payload: Record<string, unknown>
  stimulusId: number
  visualisation?: string
}

export interface LabeledPoint {
  geo: GeoCoord
  label: string
}

export interface StimulusMarkers {
  points: LabeledPoint[]
  polylines: GeoCoord[][]   // arrows, polygon outlines
  target: GeoCoord | null   // direction-task target marker
}

function asGeo(v: unknown, what: string): GeoCoord {
  if (!Array.isArray(v) || v.length !== 2
    || typeof v[0] !== 'number' || typeof v[1] !== 'number') {
    throw new Error(`${what}: expected [lon, lat]`)
  }
  if (Math.abs(v[0]) > 180 || Math.abs(v[1]) > 90) {
    throw new Error(`${what}: coordinates out of range`)
  }
  return { lon: v[0], lat: v[1] }
}

function asEntry(raw: unknown, index: number): StimulusEntry {
  if (typeof raw !== 'object' || raw === null) {
    throw new Error(`stimulus ${index}: not an object`)
  }
  const o = raw as Record<string, unknown>
  const family = o.family
  if (family !== 'distance' && family !== 'area' && family !== 'direction') {
    throw new Error(`stimulus ${index}: unknown family ${String(family)}`)
  }
  if (typeof o.payload !== 'object' || o.payload === null) {
    throw new Error(`stimulus ${index}: missing payload`)
  }
  return {
    family,
    difficulty: String(o.difficulty ?? ''),
    truth: String(o.truth ?? ''),
    separation: Number(o.separation ?? NaN),
    payload: o.payload as Record<string, unknown>,
    stimulusId: Number(o.stimulus_id ?? index),
    visualisation: typeof o.visualisation === 'string' ? o.visualisation : undefined,
  }
}

/** Accepts a `generate` batch ({tasks: [...]}) or a session ({stimuli: [...]}). */
export function parseStimuliJson(text: string): StimulusEntry[] {
  let doc: unknown
  try {
    doc = JSON.parse(text)
  } catch (e) {
    throw new Error(`not valid JSON: ${(e as Error).message}`)
  }
  if (typeof doc !== 'object' || doc === null) throw new Error('JSON root must be an object')
  const o = doc as Record<string, unknown>
  const list = (o.tasks ?? o.stimuli) as unknown
  if (!Array.isArray(list)) throw new Error("expected a 'tasks' or 'stimuli' array")
  return list.map(asEntry)
}

/** Marker geometry (labelled points, outlines, arrow + target) for a task. */
export function stimulusMarkers(e: StimulusEntry): StimulusMarkers {
  if (e.family === 'distance') {
    const ab = (e.payload.pair_ab as unknown[]).map((g, i) =>
      ({ geo: asGeo(g, 'pair_ab'), label: 'AB'[i] }))
    const xy = (e.payload.pair_xy as unknown[]).map((g, i) =>
      ({ geo: asGeo(g, 'pair_xy'), label: 'XY'[i] }))
    return { points: [...ab, ...xy], polylines: [], target: null }
  }
  if (e.family === 'area') {
    const polyA = (e.payload.poly_a as unknown[]).map((g) => asGeo(g, 'poly_a'))
    const polyB = (e.payload.poly_b as unknown[]).map((g) => asGeo(g, 'poly_b'))
    return {
      points: [
        { geo: asGeo(e.payload.centroid_a, 'centroid_a'), label: 'A' },
        { geo: asGeo(e.payload.centroid_b, 'centroid_b'), label: 'B' },
      ],
      polylines: [[...polyA, polyA[0]], [...polyB, polyB[0]]],
      target: null,
    }
  }
  const start = asGeo(e.payload.arrow_start, 'arrow_start')
  const bearing = Number(e.payload.arrow_bearing)
  const length = Number(e.payload.arrow_length ?? 10)
  const shaft: GeoCoord[] = []
  const steps = 16
  for (let i = 0; i <= steps; i++) {
    shaft.push(destination(start, bearing, (length * i) / steps))
  }
  return {
    points: [{ geo: start, label: 'S' }],
    polylines: [shaft],
    target: asGeo(e.payload.target, 'target'),
  }
}
