"""
Message overhead as the network gets denser
===========================================

Paired runs of both schemes on the same mobility traces and query streams.
Flooding pays for every node within three hops, while the zone search pays
one broadcast per ring plus a periodic neighbour refresh. Runs are shortened
to ten minutes of simulated time so the script finishes quickly; use
``ccnsim sweep`` for full-length runs.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ccnsim import SimConfig
from ccnsim.engine import aggregate, paired_savings, sweep

densities = [20, 40, 60]
reports = sweep(SimConfig(sim_time=600.0), "node_density", densities, seeds=[1, 2])

# %%
# Mean messages and total energy per scheme.

rows = aggregate(reports, "node_density")
for a in rows:
    print(f"{a.scheme:>3} density {a.value:>2}: {a.messages_total:10.0f} messages, "
          f"energy {a.energy_total:.3e}, hit ratio {a.hit_ratio:.3f}")

savings = paired_savings(reports, "node_density")
print("power savings ratio:", {d: round(v, 2) for d, v in savings.items()})

# %%
# Where the zone scheme's messages go: refresh traffic dominates, which is
# why its curve grows roughly with the number of neighbour pairs.

from ccnsim.engine import Simulation

sim = Simulation(SimConfig(sim_time=600.0, node_density=40))
sim.run()
for kind, n in sorted(sim.radio.counts.items(), key=lambda kv: -kv[1]):
    print(f"{kind.value:>16}: {n}")

# %%

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
fig, ax = plt.subplots(figsize=(5, 3.5))
for scheme, marker in (("ccn", "o"), ("nc", "s")):
    pts = [(a.value, a.messages_total) for a in rows if a.scheme == scheme]
    ax.plot(*zip(*pts), marker=marker, label=scheme.upper())
ax.set_xlabel("Node density")
ax.set_ylabel("Messages")
ax.legend()
fig.tight_layout()
fig.savefig(out / "message_overhead.svg")
