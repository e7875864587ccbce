/** Viewer state and its invariant-preserving transitions. */

import { Rotation, wrapLon } from './geo.js'
import { SceneKind } from './scenes.js'
import { StimulusEntry } from './stimuli.js'

export interface ViewerState {
  kind: SceneKind
  rotation: Rotation
  morphT: number
  showGraticule: boolean
  showTissot: boolean
  showHorizonRings: boolean
  stimuli: StimulusEntry[]
  activeStimulus: number | null
}

export function initialState(): ViewerState {
  return {
    kind: 'exocentric',
    rotation: { lam: 0, phi: 0, gamma: 0 },
    morphT: 0,
    showGraticule: true,
    showTissot: false,
    showHorizonRings: true,
    stimuli: [],
    activeStimulus: null,
  }
}

export function normalizeRotation(r: Rotation): Rotation {
  return { lam: wrapLon(r.lam), phi: wrapLon(r.phi), gamma: wrapLon(r.gamma) }
}

export function setScene(s: ViewerState, kind: SceneKind): ViewerState {
  return { ...s, kind, morphT: kind === 'exocentric' ? 1 : 0 }
}

export function setRotation(s: ViewerState, rotation: Rotation): ViewerState {
  return { ...s, rotation: normalizeRotation(rotation) }
}

export function setMorphT(s: ViewerState, t: number): ViewerState {
  return { ...s, morphT: Math.min(1, Math.max(0, t)) }
}

/** Horizon rings only ever show in the egocentric scene. */
export function horizonRingsVisible(s: ViewerState): boolean {
  return s.showHorizonRings && s.kind === 'egocentric'
}

export function loadStimuli(s: ViewerState, entries: StimulusEntry[]): ViewerState {
  return { ...s, stimuli: entries, activeStimulus: entries.length ? 0 : null }
}

export function setActiveStimulus(s: ViewerState, index: number | null): ViewerState {
  if (index !== null && (index < 0 || index >= s.stimuli.length)) {
    throw new RangeError(`stimulus index ${index} out of range`)
  }
  return { ...s, activeStimulus: index }
}
