/**
 * Interactive viewer: switch among the four scene embeddings, drag any
 * geographic location to recenter it (the grabbed point follows the
 * pointer), scrub the flat-map/globe morph, toggle graticule / Tissot /
 * horizon-ring overlays, and inspect loaded stimuli with billboarded
 * labels.
 */

import * as THREE from 'three'

import { GeoCoord, Vec3, destination } from './geo.js'
import {
  EGO_CENTER, EGO_RADIUS, EXO_CENTER, EXO_RADIUS, FLAT_CENTER, FLAT_HEIGHT,
  FLAT_WIDTH, CURVED_H_SPAN, CURVED_RADIUS, CURVED_V_SPAN,
  SCENE_KINDS, embed, graticule, horizonRings, morphPoint,
} from './scenes.js'
import { Ray, dragUpdate, pick } from './pick.js'
import {
  ViewerState, horizonRingsVisible, initialState, loadStimuli, setActiveStimulus,
  setMorphT, setRotation, setScene,
} from './state.js'
import { parseStimuliJson, stimulusMarkers } from './stimuli.js'

let state: ViewerState = initialState()

const renderer = new THREE.WebGLRenderer({ antialias: true })
renderer.setPixelRatio(window.devicePixelRatio)
document.getElementById('view')!.appendChild(renderer.domElement)

const scene3 = new THREE.Scene()
scene3.background = new THREE.Color(0x10131a)
const camera = new THREE.PerspectiveCamera(70, 1, 0.01, 100)
camera.position.set(0, 0, 0)
let camYaw = 0
let camPitch = 0

scene3.add(new THREE.AmbientLight(0xffffff, 0.9))
const sun = new THREE.DirectionalLight(0xffffff, 1.2)
sun.position.set(2, 4, 2)
scene3.add(sun)

const content = new THREE.Group()
scene3.add(content)

// --- geometry helpers -------------------------------------------------------

/** World position of a geographic point under the current state. */
function place(g: GeoCoord): Vec3 {
  if ((state.kind === 'flat' || state.kind === 'exocentric') && state.morphT > 0
    && state.morphT < 1) {
    return morphPoint(state.morphT, g, state.rotation)
  }
  return embed(state.kind, state.rotation, g)
}

function lineFrom(points: Vec3[], color: number, opacity = 1): THREE.Line {
  const geom = new THREE.BufferGeometry()
  geom.setAttribute('position',
    new THREE.Float32BufferAttribute(points.flat(), 3))
  const mat = new THREE.LineBasicMaterial({ color, transparent: opacity < 1, opacity })
  return new THREE.Line(geom, mat)
}

/** Split a projected polyline where it jumps across the flat/curved map
 * (antimeridian wrap), so strokes never cross the map face. */
function splitJumps(points: Vec3[]): Vec3[][] {
  if (state.kind === 'exocentric' || state.kind === 'egocentric') return [points]
  const limit = state.kind === 'flat' ? FLAT_WIDTH / 2 : CURVED_RADIUS
  const out: Vec3[][] = []
  let cur: Vec3[] = [points[0]]
  for (let i = 1; i < points.length; i++) {
    if (Math.abs(points[i][0] - points[i - 1][0]) > limit) {
      if (cur.length > 1) out.push(cur)
      cur = []
    }
    cur.push(points[i])
  }
  if (cur.length > 1) out.push(cur)
  return out
}

function addGeoPolyline(group: THREE.Group, pts: GeoCoord[], color: number,
  opacity = 1): void {
  for (const run of splitJumps(pts.map(place))) {
    group.add(lineFrom(run, color, opacity))
  }
}

function markerScale(): number {
  return state.kind === 'egocentric' ? 16 : 1
}

function labelSprite(text: string): THREE.Sprite {
  const canvas = document.createElement('canvas')
  canvas.width = 128
  canvas.height = 64
  const ctx = canvas.getContext('2d')!
  ctx.font = 'bold 44px sans-serif'
  ctx.textAlign = 'center'
  ctx.textBaseline = 'middle'
  ctx.fillStyle = '#ffffff'
  ctx.strokeStyle = '#000000'
  ctx.lineWidth = 6
  ctx.strokeText(text, 64, 32)
  ctx.fillText(text, 64, 32)
  const tex = new THREE.CanvasTexture(canvas)
  const sprite = new THREE.Sprite(new THREE.SpriteMaterial({ map: tex, depthTest: false }))
  const s = 0.05 * markerScale()
  sprite.scale.set(2 * s, s, 1)
  return sprite
}

// --- scene surfaces ----------------------------------------------------------

function buildSurface(group: THREE.Group): void {
  const mat = new THREE.MeshStandardMaterial({
    color: 0x1d3a5f, roughness: 0.85, metalness: 0.0,
  })
  if (state.kind === 'exocentric') {
    const s = new THREE.Mesh(new THREE.SphereGeometry(EXO_RADIUS * 0.998, 64, 32), mat)
    s.position.set(...EXO_CENTER)
    group.add(s)
  } else if (state.kind === 'egocentric') {
    const inner = new THREE.Mesh(
      new THREE.SphereGeometry(EGO_RADIUS * 1.002, 96, 48),
      new THREE.MeshStandardMaterial({
        color: 0x1d3a5f, roughness: 0.9, side: THREE.BackSide,
      }))
    inner.position.set(...EGO_CENTER)
    group.add(inner)
  } else if (state.kind === 'flat' && state.morphT === 0) {
    const quad = new THREE.Mesh(new THREE.PlaneGeometry(FLAT_WIDTH, FLAT_HEIGHT),
      new THREE.MeshStandardMaterial({ color: 0x10233c, roughness: 0.9 }))
    quad.position.set(FLAT_CENTER[0], FLAT_CENTER[1], FLAT_CENTER[2] - 0.001)
    group.add(quad)
  } else if (state.kind === 'curved') {
    const seg = 48
    const geom = new THREE.BufferGeometry()
    const verts: number[] = []
    const idx: number[] = []
    for (let i = 0; i <= seg; i++) {
      for (let j = 0; j <= seg; j++) {
        const ah = (-CURVED_H_SPAN / 2 + (CURVED_H_SPAN * i) / seg) * (Math.PI / 180)
        const av = (-CURVED_V_SPAN / 2 + (CURVED_V_SPAN * j) / seg) * (Math.PI / 180)
        const r = CURVED_RADIUS * 1.002
        verts.push(r * Math.cos(av) * Math.sin(ah), r * Math.sin(av),
          -r * Math.cos(av) * Math.cos(ah))
      }
    }
    for (let i = 0; i < seg; i++) {
      for (let j = 0; j < seg; j++) {
        const a = i * (seg + 1) + j
        idx.push(a, a + seg + 1, a + 1, a + 1, a + seg + 1, a + seg + 2)
      }
    }
    geom.setIndex(idx)
    geom.setAttribute('position', new THREE.Float32BufferAttribute(verts, 3))
    geom.computeVertexNormals()
    group.add(new THREE.Mesh(geom, new THREE.MeshStandardMaterial({
      color: 0x10233c, roughness: 0.9, side: THREE.FrontSide,
    })))
  }
}

function buildGraticule(group: THREE.Group): void {
  if (!state.showGraticule) return
  for (const line of graticule(10, 2)) {
    const color = line.emphasized ? 0x7fb2e5 : 0x3d5a7a
    addGeoPolyline(group, line.points, color, line.emphasized ? 1 : 0.8)
  }
}

function buildTissot(group: THREE.Group): void {
  if (!state.showTissot) return
  const radius = 6
  for (let lon = -150; lon <= 150; lon += 30) {
    for (let lat = -60; lat <= 60; lat += 30) {
      const ring: GeoCoord[] = []
      for (let a = 0; a <= 360; a += 10) {
        ring.push(destination({ lon, lat }, -a, radius))
      }
      addGeoPolyline(group, ring, 0xd35454, 0.9)
    }
  }
}

function buildHorizonRings(group: THREE.Group): void {
  if (!horizonRingsVisible(state)) return
  for (const ring of horizonRings()) {
    group.add(lineFrom([...ring, ring[0]], 0xf0e18a))
  }
}

function buildStimulus(group: THREE.Group): void {
  if (state.activeStimulus === null) return
  const entry = state.stimuli[state.activeStimulus]
  const markers = stimulusMarkers(entry)
  const s = 0.008 * markerScale()
  for (const pt of markers.points) {
    const world = place(pt.geo)
    const dot = new THREE.Mesh(new THREE.SphereGeometry(s, 16, 8),
      new THREE.MeshBasicMaterial({ color: 0xffd65c }))
    dot.position.set(...world)
    group.add(dot)
    const label = labelSprite(pt.label)
    const off = 6 * s
    label.position.set(world[0], world[1] + off, world[2])
    group.add(label)
    group.add(lineFrom([world, [world[0], world[1] + off * 0.7, world[2]]], 0xffd65c))
  }
  for (const line of markers.polylines) {
    addGeoPolyline(group, line, 0xffd65c)
  }
  if (markers.target) {
    const world = place(markers.target)
    const ring = new THREE.Mesh(new THREE.TorusGeometry(2.2 * s, 0.5 * s, 8, 32),
      new THREE.MeshBasicMaterial({ color: 0xff8c42 }))
    ring.position.set(...world)
    ring.lookAt(camera.position)
    group.add(ring)
  }
}

function rebuild(): void {
  content.clear()
  buildSurface(content)
  buildGraticule(content)
  buildTissot(content)
  buildHorizonRings(content)
  buildStimulus(content)
  updateHud()
}

// --- interaction -------------------------------------------------------------

function pointerRay(ev: PointerEvent): Ray {
  const rect = renderer.domElement.getBoundingClientRect()
  const nx = ((ev.clientX - rect.left) / rect.width) * 2 - 1
  const ny = -(((ev.clientY - rect.top) / rect.height) * 2 - 1)
  const v = new THREE.Vector3(nx, ny, 0.5).unproject(camera)
  const dir = v.sub(camera.position).normalize()
  return { origin: [camera.position.x, camera.position.y, camera.position.z],
           dir: [dir.x, dir.y, dir.z] }
}

let dragging: GeoCoord | null = null
let looking = false
let lastPointer = { x: 0, y: 0 }

renderer.domElement.addEventListener('pointerdown', (ev) => {
  lastPointer = { x: ev.clientX, y: ev.clientY }
  if (ev.button === 2) {
    looking = true
    return
  }
  const hit = pick(state.kind, state.rotation, pointerRay(ev))
  if (hit) dragging = hit.geo
})

renderer.domElement.addEventListener('pointermove', (ev) => {
  if (looking) {
    camYaw -= (ev.clientX - lastPointer.x) * 0.003
    camPitch = Math.min(1.5, Math.max(-1.5,
      camPitch - (ev.clientY - lastPointer.y) * 0.003))
    camera.quaternion.setFromEuler(new THREE.Euler(camPitch, camYaw, 0, 'YXZ'))
    lastPointer = { x: ev.clientX, y: ev.clientY }
    return
  }
  if (!dragging) return
  const next = dragUpdate(state.kind, state.rotation, dragging, pointerRay(ev))
  state = setRotation(state, next)
  rebuild()
})

window.addEventListener('pointerup', () => {
  dragging = null
  looking = false
})
renderer.domElement.addEventListener('contextmenu', (ev) => ev.preventDefault())

// --- UI ----------------------------------------------------------------------

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T
}

function updateHud(): void {
  const r = state.rotation
  el<HTMLSpanElement>('rotation-readout').textContent =
    `λ ${r.lam.toFixed(1)}°  φ ${r.phi.toFixed(1)}°  γ ${r.gamma.toFixed(1)}°`
  el<HTMLSpanElement>('stimulus-readout').textContent = state.activeStimulus === null
    ? 'none'
    : `${state.activeStimulus + 1}/${state.stimuli.length} ` +
      `(${state.stimuli[state.activeStimulus].family})`
  el<HTMLInputElement>('morph').value = String(state.morphT)
  el<HTMLDivElement>('morph-row').style.display =
    state.kind === 'flat' || state.kind === 'exocentric' ? 'flex' : 'none'
}

for (const kind of SCENE_KINDS) {
  el<HTMLButtonElement>(`scene-${kind}`).addEventListener('click', () => {
    state = setScene(state, kind)
    camYaw = 0
    camPitch = 0
    camera.quaternion.identity()
    rebuild()
  })
}

el<HTMLInputElement>('morph').addEventListener('input', (ev) => {
  state = setMorphT(state, Number((ev.target as HTMLInputElement).value))
  rebuild()
})

el<HTMLButtonElement>('reset-rotation').addEventListener('click', () => {
  state = setRotation(state, { lam: 0, phi: 0, gamma: 0 })
  rebuild()
})

for (const flag of ['graticule', 'tissot', 'horizon'] as const) {
  el<HTMLInputElement>(`toggle-${flag}`).addEventListener('change', (ev) => {
    const on = (ev.target as HTMLInputElement).checked
    if (flag === 'graticule') state = { ...state, showGraticule: on }
    else if (flag === 'tissot') state = { ...state, showTissot: on }
    else state = { ...state, showHorizonRings: on }
    rebuild()
  })
}

el<HTMLInputElement>('stimuli-file').addEventListener('change', async (ev) => {
  const file = (ev.target as HTMLInputElement).files?.[0]
  if (!file) return
  try {
    state = loadStimuli(state, parseStimuliJson(await file.text()))
    el<HTMLSpanElement>('load-error').textContent = ''
  } catch (e) {
    el<HTMLSpanElement>('load-error').textContent = (e as Error).message
  }
  rebuild()
})

el<HTMLButtonElement>('stimulus-prev').addEventListener('click', () => stepStimulus(-1))
el<HTMLButtonElement>('stimulus-next').addEventListener('click', () => stepStimulus(1))

function stepStimulus(delta: number): void {
  if (!state.stimuli.length) return
  const cur = state.activeStimulus ?? 0
  const next = (cur + delta + state.stimuli.length) % state.stimuli.length
  state = setActiveStimulus(state, next)
  rebuild()
}

// --- main loop ---------------------------------------------------------------

function resize(): void {
  const host = document.getElementById('view')!
  const w = host.clientWidth
  const h = host.clientHeight
  renderer.setSize(w, h)
  camera.aspect = w / h
  camera.updateProjectionMatrix()
}
window.addEventListener('resize', resize)
resize()
rebuild()

renderer.setAnimationLoop(() => {
  renderer.render(scene3, camera)
})
