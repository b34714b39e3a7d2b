import json
import math
import sys

for line in sys.stdin:
    req = json.loads(line)
    t1, t2 = req["theta"]
    g = -(t1 * t1 + 4.0) * (t2 - 1.0) / 20.0 + math.sin(2.5 * t1) + 2.0
    sys.stdout.write(json.dumps({"id": req["id"], "g": g}) + "\n")
    sys.stdout.flush()
