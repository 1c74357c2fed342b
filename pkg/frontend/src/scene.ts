/**
 * Scene model: the last received snapshot with diffs folded in.
 *
 * Revision handling is strictly monotone: a snapshot replaces state only at
 * an equal-or-higher revision; a diff applies only when it continues the
 * current revision exactly. Anything else is reported as a gap so the client
 * can request a fresh snapshot — a reordered or replayed message can never
 * make the rendered revision go backwards.
 */
import type { Snapshot, StateDiff } from "./protocol.js";

export type ApplyResult = "applied" | "stale" | "gap";

export class SceneModel {
  snapshot: Snapshot | null = null;

  get revision(): number {
    return this.snapshot ? this.snapshot.revision : -1;
  }

  applySnapshot(snapshot: Snapshot): ApplyResult {
    if (this.snapshot && snapshot.revision < this.snapshot.revision) {
      return "stale";
    }
    this.snapshot = structuredClone(snapshot);
    return "applied";
  }

  applyDiff(diff: StateDiff): ApplyResult {
    if (!this.snapshot) {
      return "gap";
    }
    if (diff.revision <= this.snapshot.revision) {
      return "stale";
    }
    if (diff.revision !== this.snapshot.revision + 1) {
      return "gap";
    }
    const snap = this.snapshot;
    snap.revision = diff.revision;
    for (const [nodeId, changes] of Object.entries(diff.nodes ?? {})) {
      Object.assign(snap.nodes[nodeId], changes);
    }
    for (const [linkId, changes] of Object.entries(diff.links ?? {})) {
      Object.assign(snap.links[linkId], changes);
    }
    if (diff.groups_removed || diff.groups_added || diff.groups_changed) {
      const groups = new Map(snap.groups.map((g) => [g.group_id, g]));
      for (const gid of diff.groups_removed ?? []) {
        groups.delete(gid);
      }
      for (const added of diff.groups_added ?? []) {
        groups.set(added.group_id, { group_id: added.group_id, members: [...added.members] });
      }
      for (const [gid, members] of Object.entries(diff.groups_changed ?? {})) {
        const group = groups.get(gid);
        if (group) {
          group.members = [...members];
        }
      }
      snap.groups = [...groups.values()].sort((a, b) =>
        a.group_id.localeCompare(b.group_id),
      );
    }
    for (const [magnet, node] of Object.entries(diff.bindings ?? {})) {
      snap.bindings[magnet] = node;
    }
    for (const magnet of diff.bindings_removed ?? []) {
      delete snap.bindings[magnet];
    }
    if (diff.group_seq !== undefined) {
      snap.group_seq = diff.group_seq;
    }
    if (diff.command !== undefined) {
      snap.command_log.push(diff.command);
    }
    return "applied";
  }
}
