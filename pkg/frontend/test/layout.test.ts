import { test } from "node:test";
import assert from "node:assert/strict";

import { layoutTree, MIN_GAP } from "../src/layout.js";
import type { CaseEdge, CaseNode, NodeKind } from "../src/model.js";

function node(id: string, kind: NodeKind): CaseNode {
  return { id, kind, text: id, tags: [], binding: null, undeveloped: false };
}

function sb(source: string, target: string): CaseEdge {
  return { source, target, kind: "supported_by" };
}

function ico(source: string, target: string): CaseEdge {
  return { source, target, kind: "in_context_of" };
}

// a compact mirror of the shipped case's shape
const sampleNodes: CaseNode[] = [
  node("G1", "goal"),
  node("C1", "context"),
  node("S1", "strategy"),
  node("J1", "justification"),
  node("G2", "goal"),
  node("G3", "goal"),
  node("A1", "assumption"),
  node("C2", "context"),
  node("C3", "context"),
  node("Sn1", "solution"),
  node("G4", "goal"),
  node("Sn2", "solution"),
];
const sampleEdges: CaseEdge[] = [
  sb("G1", "S1"),
  ico("G1", "C1"),
  ico("S1", "J1"),
  sb("S1", "G2"),
  sb("S1", "G4"),
  sb("G2", "G3"),
  sb("G3", "Sn1"),
  ico("G3", "A1"),
  ico("G3", "C2"),
  ico("G3", "C3"),
  sb("G4", "Sn2"),
];

test("chain gets one node per layer, vertically aligned", () => {
  const layout = layoutTree(
    [node("G1", "goal"), node("G2", "goal"), node("Sn1", "solution")],
    [sb("G1", "G2"), sb("G2", "Sn1")],
    "G1",
  );
  assert.equal(layout.nodes["G1"].y, 0);
  assert.equal(layout.nodes["G2"].y, 1);
  assert.equal(layout.nodes["Sn1"].y, 2);
  assert.equal(layout.nodes["G1"].x, layout.nodes["Sn1"].x);
});

test("parent sits over the mean of its children", () => {
  const layout = layoutTree(
    [
      node("G1", "goal"),
      node("Sn1", "solution"),
      node("Sn2", "solution"),
      node("Sn3", "solution"),
    ],
    [sb("G1", "Sn1"), sb("G1", "Sn2"), sb("G1", "Sn3")],
    "G1",
  );
  const xs = ["Sn1", "Sn2", "Sn3"].map((id) => layout.nodes[id].x);
  const mean = xs.reduce((a, b) => a + b, 0) / xs.length;
  assert.equal(layout.nodes["G1"].x, mean);
});

test("attachments share the anchor's layer and sit to its right", () => {
  const layout = layoutTree(sampleNodes, sampleEdges, "G1");
  for (const [anchor, attached] of [
    ["G1", "C1"],
    ["S1", "J1"],
    ["G3", "A1"],
  ] as const) {
    assert.equal(layout.nodes[attached].y, layout.nodes[anchor].y);
    assert.ok(layout.nodes[attached].x > layout.nodes[anchor].x);
    assert.equal(layout.nodes[attached].anchor, anchor);
  }
});

test("every node is placed exactly once and layers keep the minimum gap", () => {
  const layout = layoutTree(sampleNodes, sampleEdges, "G1");
  assert.equal(Object.keys(layout.nodes).length, sampleNodes.length);

  const byLayer = new Map<number, number[]>();
  for (const placed of Object.values(layout.nodes)) {
    const xs = byLayer.get(placed.y) ?? [];
    xs.push(placed.x);
    byLayer.set(placed.y, xs);
  }
  for (const xs of byLayer.values()) {
    xs.sort((a, b) => a - b);
    for (let i = 1; i < xs.length; i += 1) {
      assert.ok(
        xs[i] - xs[i - 1] >= MIN_GAP - 1e-9,
        `layer spacing ${xs[i] - xs[i - 1]}`,
      );
    }
  }
});

test("spine depth follows supported-by nesting", () => {
  const layout = layoutTree(sampleNodes, sampleEdges, "G1");
  assert.equal(layout.nodes["G1"].y, 0);
  assert.equal(layout.nodes["S1"].y, 1);
  assert.equal(layout.nodes["G2"].y, 2);
  assert.equal(layout.nodes["G3"].y, 3);
  assert.equal(layout.nodes["Sn1"].y, 4);
  assert.equal(layout.nodes["G4"].y, 2);
  assert.equal(layout.nodes["Sn2"].y, 3);
});

test("layout is deterministic", () => {
  const a = layoutTree(sampleNodes, sampleEdges, "G1");
  const b = layoutTree(sampleNodes, sampleEdges, "G1");
  assert.deepEqual(a, b);
});

test("unknown edge endpoint fails loudly", () => {
  assert.throws(() =>
    layoutTree([node("G1", "goal")], [sb("G1", "ghost")], "G1"),
  );
});
