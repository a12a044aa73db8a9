# %% [markdown]
# # Moving mid-IR photons into detector bands
#
# The seed acts as the pump of a type-0 interaction: seed → output + mid-IR.
# Energy conservation fixes the output; the type-0 grating period follows.

# %%
from pdc_match.materials import get_material
from pdc_match.upconv import seed_for_target, upconvert

gap, ln = get_material("OPGaP"), get_material("PPLN")

for rec, seed, mid in ((gap, 1.25, 6.028), (gap, 1.25, 6.62), (gap, 1.25, 7.384), (ln, 0.66, 3.0), (ln, 0.66, 5.0)):
    s = upconvert(rec, seed, mid)
    print(f"{rec.id:6s} {seed:.3f} + {mid:.3f} um -> {s.output * 1000:7.2f} nm  {s.detector_band.value:7s} "
          f"Lambda {s.period:8.3f} um  transparent={s.within_transparency}")

# %% [markdown]
# A seed of 1250 nm puts 6028 nm at 1577 nm. Landing exactly on 1550 nm takes
# a slightly shorter seed:

# %%
print(seed_for_target(gap, 6.028, 1.55).seed)
