"""
Hit ratio against cache size
============================

Cache size is a percentage of the summed item sizes. With the default
workload no node holds more than a few hundred size units of live data at
once, so caches of 20 % and more never fill and both curves stay flat.
Pressure only shows at a few percent. Runs here are shortened to 15 simulated
minutes.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ccnsim import SimConfig
from ccnsim.engine import Simulation, aggregate, sweep

base = SimConfig(sim_time=900.0, node_density=40)
pcts = [1.0, 2.0, 5.0, 20.0, 40.0, 70.0]
reports = sweep(base, "cache_size_pct", pcts, seeds=[1])
rows = aggregate(reports, "cache_size_pct")
for a in rows:
    print(f"{a.scheme:>3} cache {a.value:>4.0f} %: hit ratio {a.hit_ratio:.3f}")

# %%
# How full do caches get? Peak occupancy of the busiest node, against
# the capacity at 20 %.

sim = Simulation(base.replace(cache_pct=20.0))
peak = 0
step = 60.0
t = 0.0
while t < base.sim_time:
    t += step
    sim.run_until(t)
    peak = max(peak, max(c.used for c in sim.caches))
sim.finish()
print(f"capacity {sim.capacity} units, peak occupancy {peak} units")

# %%
# Where hits come from under each scheme. Flooding reaches three hops and
# caches what neighbours send back; the zone search stays within one hop.

for scheme in ("ccn", "nc"):
    rep = next(r for r in reports if r.scheme == scheme and r.cache_pct == 40.0)
    print(f"{scheme}: local {rep.hits_local}, remote {rep.hits_remote}, server {rep.server_fetches}")

# %%

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
fig, ax = plt.subplots(figsize=(5, 3.5))
for scheme, marker in (("ccn", "o"), ("nc", "s")):
    pts = [(a.value, a.hit_ratio) for a in rows if a.scheme == scheme]
    ax.plot(*zip(*pts), marker=marker, label=scheme.upper())
ax.set_xscale("log")
ax.set_xlabel("Cache size (% of database)")
ax.set_ylabel("Hit ratio")
ax.legend()
fig.tight_layout()
fig.savefig(out / "hit_ratio.svg")
