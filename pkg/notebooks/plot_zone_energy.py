"""
Zone escalation versus one full-range broadcast
===============================================

A lookup searches the rings R/6, R/4, R/2 and R one after another and stops
at the first ring that answers. Because transmit energy grows with range
squared, stopping early is cheap. This script compares the cost of stopping
at each ring against a single broadcast at R, then checks the numbers on a
small static layout.
"""

# %%
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ccnsim import SimConfig
from ccnsim.engine import Simulation
from ccnsim.geometry import DataItem, zone_radii


def pinned_sim(coords):
    cfg = SimConfig(queries_enabled=False)
    return Simulation(cfg, trace=True, static_positions=np.asarray(coords))


R = 500.0
radii = np.array(zone_radii(R))
cumulative = np.cumsum(radii ** 2)
print("ring radii:", radii)
print("energy if the search stops at ring k:", cumulative)
print("as a fraction of one broadcast at R:", np.round(cumulative / R**2, 3))

# %%
# Searching every ring costs more than one broadcast at R, but only about
# a third more. Stopping within the first three rings always costs less.

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.bar(["R/6", "R/4", "R/2", "R"], cumulative / R**2, color="tab:blue", label="escalating search")
ax.axhline(1.0, color="tab:red", ls="--", label="one broadcast at R")
ax.set_xlabel("ring that answers")
ax.set_ylabel("energy / R²")
ax.legend()
fig.tight_layout()
fig.savefig(out / "zone_energy.svg")

# %%
# The same figure from a simulation: four neighbours, one per ring, and
# the item held by the neighbour in ring k.

for k, d in enumerate([50.0, 100.0, 200.0, 400.0]):
    coords = [(500.0, 500.0)] + [(500.0 + r * math.cos(i), 500.0 + r * math.sin(i))
                                 for i, r in enumerate([50.0, 100.0, 200.0, 400.0])]
    sim = pinned_sim(coords)
    sim.caches[k + 1].insert(DataItem(7, 3, 5000.0), 0.0)
    rid = sim.issue_query(0, 7, 1.0)
    sim.run_until(2.0)
    trace = next(t for t in sim.protocol.traces if t.request_id == rid)
    print(f"holder at {d:5.0f} m: zones {trace.zones_visited}, energy {trace.energy:9.1f}, "
          f"latency {1000 * (sim.requests[rid].resolved_at - 1.0):.0f} ms")
