"""Stdio classifier server for the bridge tests.

P(class 1) = m / (m + 1) for a graph with m edges. Flags:
  --feature-dim D   announce D (default 10)
  --bad-len         answer with three probabilities
  --error-on K      reply with an error frame to the request with id K
"""
import json
import sys


def main():
    args = sys.argv[1:]
    dim = int(args[args.index("--feature-dim") + 1]) if "--feature-dim" in args else 10
    error_on = int(args[args.index("--error-on") + 1]) if "--error-on" in args else None
    bad_len = "--bad-len" in args
    out = sys.stdout
    out.write(json.dumps({"type": "hello", "num_classes": 2, "feature_dim": dim}) + "\n")
    out.flush()
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            rid = req["id"]
            m = len(req["graph"]["edges"])
        except (ValueError, KeyError) as e:
            out.write(json.dumps({"type": "error", "id": None, "message": str(e)}) + "\n")
            out.flush()
            continue
        if rid == error_on:
            resp = {"type": "error", "id": rid, "message": "refused"}
        else:
            p1 = m / (m + 1.0)
            probs = [1.0 - p1, p1, 0.0] if bad_len else [1.0 - p1, p1]
            resp = {"type": "probs", "id": rid, "probs": probs}
        out.write(json.dumps(resp) + "\n")
        out.flush()


if __name__ == "__main__":
    main()
