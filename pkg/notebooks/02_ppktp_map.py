# %% [markdown]
# # A θ/|Λ| map and its loci
#
# `scan` evaluates the pump × signal grid. Cells that are not usable carry
# mask bits, and the θ = 0/45/90 contours are refined vertex by vertex. The
# export is byte-stable, so a map can be diffed between runs.

# %%
import numpy as np

from pdc_match.materials import get_material
from pdc_match.sweep import MaskFlag, export, scan

ktp = get_material("PPKTP")
grid = scan(ktp, ktp.config("typeII"), (0.7, 1.3), (0.9, 3.0), resolution=256)
print(grid.theta.shape, "usable cells:", int(grid.ok.sum()))

# %%
for flag in MaskFlag:
    if flag:
        print(f"{flag.name:28s}", int(((grid.mask & np.uint8(flag)) != 0).sum()))

# %%
for name, segments in sorted(grid.loci.items()):
    print(name, [len(s) for s in segments])

pts = np.vstack(grid.loci["theta_45"])
k = np.argmin(np.hypot(pts[:, 0] - 0.791, pts[:, 1] - 1.582))
print("theta_45 vertex nearest degeneracy:", pts[k])

# %%
export(grid, "json", "/tmp/ppktp_typeII.json")
export(grid, "csv", "/tmp/ppktp_typeII.csv")   # also writes ppktp_typeII.loci.csv
