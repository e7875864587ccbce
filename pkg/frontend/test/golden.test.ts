/**
 * Conformance suite: the viewer's independent embedding math must reproduce
 * the toolkit-emitted geo->world golden vectors within 1e-6 m.
 */

import { readFileSync } from 'node:fs'
import { fileURLToPath } from 'node:url'
import { describe, expect, it } from 'vitest'

import { Rotation } from '../src/geo'
import { SceneKind, embed } from '../src/scenes'

interface GoldenScene {
  scene: { kind: SceneKind; rotation: [number, number, number]; params: Record<string, number> }
  samples: { geo: [number, number]; world: [number, number, number] }[]
}

const fixturePath = fileURLToPath(new URL('./fixtures/golden_vectors.json', import.meta.url))
const doc = JSON.parse(readFileSync(fixturePath, 'utf8')) as { scenes: GoldenScene[] }

describe('golden-vector conformance', () => {
  it('has at least 100 samples per scene for all four kinds', () => {
    const kinds = new Set(doc.scenes.map((s) => s.scene.kind))
    expect(kinds).toEqual(new Set(['exocentric', 'flat', 'egocentric', 'curved']))
    for (const entry of doc.scenes) {
      expect(entry.samples.length).toBeGreaterThanOrEqual(100)
    }
  })

  for (const entry of doc.scenes) {
    const { kind, rotation } = entry.scene
    const rot: Rotation = { lam: rotation[0], phi: rotation[1], gamma: rotation[2] }
    it(`reproduces ${kind} at rotation (${rotation.join(', ')}) within 1e-6 m`, () => {
      let worst = 0
      for (const s of entry.samples) {
        const w = embed(kind, rot, { lon: s.geo[0], lat: s.geo[1] })
        const err = Math.hypot(
          w[0] - s.world[0], w[1] - s.world[1], w[2] - s.world[2])
        worst = Math.max(worst, err)
      }
      expect(worst).toBeLessThan(1e-6)
    })
  }
})
