import { describe, expect, it, vi } from "vitest";

import { ProtocolClient, type SocketLike } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: (() => void) | null = null;
  onopen: (() => void) | null = null;

  constructor(readonly url: string) {}

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.onclose?.();
  }

  serverSays(doc: unknown): void {
    this.onmessage?.({ data: JSON.stringify(doc) });
  }
}

function makeClient(onMessage: (m: unknown) => void = () => {}) {
  const sockets: FakeSocket[] = [];
  const client = new ProtocolClient({
    url: "ws://test/ws",
    makeSocket: (url) => {
      const s = new FakeSocket(url);
      sockets.push(s);
      return s;
    },
    onMessage: onMessage as never,
    reconnectDelayMs: 0,
  });
  return { client, sockets };
}

describe("ProtocolClient", () => {
  it("tracks the seq high-water mark", () => {
    const { client, sockets } = makeClient();
    client.connect();
    sockets[0]!.onopen?.();
    sockets[0]!.serverSays({ type: "end_of_piece", seq: 7 });
    expect(client.seq).toBe(7);
  });

  it("queues messages while disconnected and flushes on open", () => {
    const { client, sockets } = makeClient();
    client.connect();
    client.send({ type: "raise_hand", part: "vla" }); // socket not open yet
    expect(client.pending).toHaveLength(1);
    sockets[0]!.onopen?.();
    expect(client.pending).toHaveLength(0);
    expect(sockets[0]!.sent).toEqual([JSON.stringify({ type: "raise_hand", part: "vla" })]);
  });

  it("reconnects with resume-from-seq", async () => {
    vi.useFakeTimers();
    try {
      const { client, sockets } = makeClient();
      client.connect();
      sockets[0]!.onopen?.();
      sockets[0]!.serverSays({ type: "end_of_piece", seq: 42 });
      sockets[0]!.onclose?.(); // dropped by the network
      await vi.runAllTimersAsync();
      expect(sockets).toHaveLength(2);
      expect(sockets[1]!.url).toContain("since=42");
    } finally {
      vi.useRealTimers();
    }
  });

  it("stays connected through unparseable frames", () => {
    const seen: unknown[] = [];
    const { client, sockets } = makeClient((m) => seen.push(m));
    client.connect();
    sockets[0]!.onopen?.();
    sockets[0]!.onmessage?.({ data: "not json{" });
    sockets[0]!.serverSays({ type: "end_of_piece", seq: 1 });
    expect(seen).toHaveLength(1);
    expect(client.isOpen).toBe(true);
  });

  it("does not reconnect after an intentional close", async () => {
    vi.useFakeTimers();
    try {
      const { client, sockets } = makeClient();
      client.connect();
      sockets[0]!.onopen?.();
      client.close();
      await vi.runAllTimersAsync();
      expect(sockets).toHaveLength(1);
    } finally {
      vi.useRealTimers();
    }
  });
});
