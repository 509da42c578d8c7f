"""Reference external translator: echoes every tile back unchanged.

Run as ``python -m seamstain.echo_translator``.  Serves two purposes: a
working example of the wire protocol for authors of real translator
processes, and a test double whose ``--corrupt`` / ``--die-after`` /
``--stall-after`` flags exercise the client's failure paths.
"""

from __future__ import annotations

import argparse
import struct
import sys
import time

from . import wire


def serve(
    corrupt: str = "none",
    die_after: int = -1,
    stall_after: int = -1,
    delay: float = 0.0,
) -> None:
    stdin = sys.stdin.buffer
    stdout = sys.stdout.buffer
    answered = 0
    while True:
        try:
            req = wire.read_request(stdin)
        except EOFError:
            return
        if req.msg_type == wire.MSG_HANDSHAKE:
            wire.write_response(stdout, wire.MSG_HANDSHAKE, 0)
            continue
        if req.msg_type != wire.MSG_REQUEST:
            return
        if stall_after >= 0 and answered >= stall_after:
            continue  # swallow the request, keep running: client should time out
        if die_after >= 0 and answered >= die_after:
            return
        if delay > 0:
            time.sleep(delay)
        if corrupt == "magic":
            _write_raw(stdout, b"XXXX", wire.VERSION, wire.MSG_RESPONSE, req)
        elif corrupt == "version":
            _write_raw(stdout, wire.MAGIC, 99, wire.MSG_RESPONSE, req)
        elif corrupt == "tile_id":
            wire.write_response(stdout, wire.MSG_RESPONSE, req.tile_id + 1, req.pixels)
        else:
            wire.write_response(stdout, wire.MSG_RESPONSE, req.tile_id, req.pixels)
        answered += 1


def _write_raw(stream, magic: bytes, version: int, msg_type: int, req) -> None:
    height, width = req.pixels.shape[:2]
    stream.write(
        struct.pack("<4sBBIHHB", magic, version, msg_type, req.tile_id, width, height, 3)
    )
    stream.write(req.pixels.tobytes())
    stream.flush()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--corrupt",
        choices=["none", "magic", "version", "tile_id"],
        default="none",
        help="deliberately violate the protocol in replies",
    )
    parser.add_argument(
        "--die-after", type=int, default=-1, help="exit after N replies (simulated crash)"
    )
    parser.add_argument(
        "--stall-after",
        type=int,
        default=-1,
        help="stop replying after N replies but stay alive (timeout testing)",
    )
    parser.add_argument("--delay", type=float, default=0.0, help="seconds to sleep per tile")
    args = parser.parse_args(argv)
    serve(
        corrupt=args.corrupt,
        die_after=args.die_after,
        stall_after=args.stall_after,
        delay=args.delay,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
