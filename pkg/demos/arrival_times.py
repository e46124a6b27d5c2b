"""Does the tunneled packet arrive early?

Compares the mean position of the transmitted part with that of the same
packet propagated freely.  The transmitted part is ahead, yet nothing ever
crosses the light cone: the barrier reshapes the packet, it does not speed
anything up.

    python3 demos/arrival_times.py [preset ...]
"""

import math
import sys

from cqft_tunnel.scenarios import compare_free, load_preset

for name in sys.argv[1:] or ["fig2"]:
    scenario = load_preset(name)
    print(name)
    for t, x_tr, x_free in compare_free(scenario):
        front = scenario.cone.front(t)
        if math.isnan(x_tr):
            print(f"  t = {t:.3e}  nothing transmitted yet")
            continue
        print(f"  t = {t:.3e}  <X_tr> = {x_tr:+.4f}  <X_free> = {x_free:+.4f}  front = {front:+.4f}")
