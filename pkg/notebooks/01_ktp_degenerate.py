# %% [markdown]
# # Symmetric and asymmetric GVM in PPKTP
#
# Type-II PPKTP at degeneracy has two special pumps. At one, the pump group
# delay sits halfway between the daughters (θ = 45°). At the other, it equals
# one daughter's group delay (θ = 0° or 90°, depending on which daughter is
# labelled "signal").

# %%
from pdc_match.gvm import dispersion_parameter, find_degenerate_locus
from pdc_match.materials import get_material
from pdc_match.phasematch import WavelengthTriple

ktp = get_material("PPKTP")
cfg = ktp.config("typeII")

# %%
for theta, rng in ((45, (0.7, 0.9)), (0, (1.0, 1.5)), (90, (1.0, 1.5))):
    for label, c in (("a", cfg), ("b", cfg.exchanged())):
        for root in find_degenerate_locus(ktp, c, theta, rng):
            print(f"theta={theta:>2} variant {label}: pump {root.pump:.5f} um, |Lambda| {root.abs_period:.2f} um")

# %% [markdown]
# The exchanged variant maps D to 1/D at degeneracy, so its θ = 0 root is
# the θ = 90 root of the table entry.

# %%
t = WavelengthTriple.degenerate(1.2)
print(dispersion_parameter(ktp, cfg, t).theta, dispersion_parameter(ktp, cfg.exchanged(), t).theta)
