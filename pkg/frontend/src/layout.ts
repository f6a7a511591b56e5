/** Layered top-down tree layout.
 *
 * The supported-by spine is laid out by post-order slot assignment
 * (leaves take consecutive slots, parents sit over the mean of their
 * children); in-context-of attachments are placed beside their anchor
 * on the same layer. A final left-to-right sweep per layer enforces a
 * minimum horizontal gap. Positions are in abstract units; the renderer
 * scales them to pixels.
 */

import type { CaseEdge, CaseNode, EdgeKind, NodeKind } from "./model.js";

export interface PlacedNode {
  id: string;
  kind: NodeKind;
  x: number;
  y: number;
  /** set for in-context-of attachments: the node they hang off */
  anchor?: string;
}

export interface PlacedEdge {
  source: string;
  target: string;
  kind: EdgeKind;
}

export interface TreeLayout {
  nodes: Record<string, PlacedNode>;
  edges: PlacedEdge[];
  width: number;
  height: number;
}

export const MIN_GAP = 0.9;
const ATTACH_OFFSET = 0.75;

export function layoutTree(
  nodes: CaseNode[],
  edges: CaseEdge[],
  root: string,
): TreeLayout {
  const byId = new Map(nodes.map((n) => [n.id, n]));
  const children = new Map<string, string[]>();
  const attachments = new Map<string, string[]>();
  for (const edge of edges) {
    const bucket = edge.kind === "supported_by" ? children : attachments;
    const list = bucket.get(edge.source) ?? [];
    list.push(edge.target);
    bucket.set(edge.source, list);
  }

  const placed: Record<string, PlacedNode> = {};
  let nextSlot = 0;

  const placeSpine = (id: string, depth: number): number => {
    const node = byId.get(id);
    if (!node) throw new Error(`layout: unknown node ${id}`);
    const kids = children.get(id) ?? [];
    let x: number;
    if (kids.length === 0) {
      x = nextSlot;
      nextSlot += 1;
    } else {
      const xs = kids.map((kid) => placeSpine(kid, depth + 1));
      x = xs.reduce((a, b) => a + b, 0) / xs.length;
    }
    placed[id] = { id, kind: node.kind, x, y: depth };
    return x;
  };
  placeSpine(root, 0);

  // side attachments share their anchor's layer, offset to the right
  for (const [anchorId, attached] of attachments) {
    const anchor = placed[anchorId];
    if (!anchor) continue;
    attached.forEach((id, index) => {
      const node = byId.get(id);
      if (!node) throw new Error(`layout: unknown node ${id}`);
      placed[id] = {
        id,
        kind: node.kind,
        x: anchor.x + ATTACH_OFFSET + index * MIN_GAP,
        y: anchor.y,
        anchor: anchorId,
      };
    });
  }

  // per-layer sweep: preserve left-to-right order, enforce the gap
  const layers = new Map<number, PlacedNode[]>();
  for (const node of Object.values(placed)) {
    const layer = layers.get(node.y) ?? [];
    layer.push(node);
    layers.set(node.y, layer);
  }
  for (const layer of layers.values()) {
    layer.sort((a, b) => a.x - b.x || a.id.localeCompare(b.id));
    for (let i = 1; i < layer.length; i += 1) {
      const gap = layer[i].x - layer[i - 1].x;
      if (gap < MIN_GAP) layer[i].x = layer[i - 1].x + MIN_GAP;
    }
  }

  const xs = Object.values(placed).map((n) => n.x);
  const ys = Object.values(placed).map((n) => n.y);
  return {
    nodes: placed,
    edges: edges.map((e) => ({ ...e })),
    width: Math.max(...xs) - Math.min(...xs) + 1,
    height: Math.max(...ys) + 1,
  };
}
