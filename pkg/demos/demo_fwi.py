"""Walk one day of weather through the fire-weather index chain.

The six codes build on each other: three moisture codes updated from
yesterday's values, then three behavior indices derived from today's codes.
Run: python demos/demo_fwi.py
"""

from firedss import fwi

# A textbook startup day: codes at their documented initial values,
# a warm dry afternoon with a stiff wind and no rain.
weather = fwi.FwiInputs(temp=17.0, rh=42.0, wind=25.0, rain=0.0, month=4)
print(f"weather: {weather}")

ffmc = fwi.update_ffmc(fwi.FFMC_START, weather)
dmc = fwi.update_dmc(fwi.DMC_START, weather)
dc = fwi.update_dc(fwi.DC_START, weather)
print(f"\nmoisture codes from startup {fwi.FFMC_START}/{fwi.DMC_START}/{fwi.DC_START}:")
print(f"  FFMC {ffmc:7.3f}   (surface litter dries fast: biggest jump)")
print(f"  DMC  {dmc:7.3f}   (duff layer moves slower)")
print(f"  DC   {dc:7.3f}   (deep layer slowest of all)")

isi = fwi.isi(ffmc, weather.wind)
bui = fwi.bui(dmc, dc)
final = fwi.fwi(isi, bui)
print("\nbehavior indices:")
print(f"  ISI  {isi:7.3f}   (spread: wind x fine-fuel dryness)")
print(f"  BUI  {bui:7.3f}   (available fuel from DMC + DC)")
print(f"  FWI  {final:7.3f}   (composite danger)")

# A week of hot, rainless days: watch the codes climb.
print("\na rainless hot week, day by day:")
f, d, c = fwi.FFMC_START, fwi.DMC_START, fwi.DC_START
hot = fwi.FwiInputs(temp=31.0, rh=20.0, wind=15.0, rain=0.0, month=8)
for day in range(1, 8):
    f = fwi.update_ffmc(f, hot)
    d = fwi.update_dmc(d, hot)
    c = fwi.update_dc(c, hot)
    i = fwi.isi(f, hot.wind)
    z = fwi.fwi(i, fwi.bui(d, c))
    print(f"  day {day}: FFMC {f:5.1f}  DMC {d:5.1f}  DC {c:5.1f}  FWI {z:5.1f}")

# Then the storm arrives.
storm = fwi.FwiInputs(temp=16.0, rh=95.0, wind=30.0, rain=40.0, month=8)
f2, d2, c2 = fwi.update_ffmc(f, storm), fwi.update_dmc(d, storm), fwi.update_dc(c, storm)
print(f"\nafter 40 mm of rain: FFMC {f2:5.1f}  DMC {d2:5.1f}  DC {c2:5.1f}")

# Classification attaches operational labels to raw code values.
codes = fwi.FwiCodes(ffmc=92.3, dmc=88.9, dc=495.6, isi=8.5,
                     bui=fwi.bui(88.9, 495.6), fwi=0.0)
labels = fwi.classify(codes)
print("\ndanger classification of a severe observation:")
print(f"  ignition potential: {labels.ignition_potential}")
print(f"  duff consumption:   {labels.dmc_class}")
print(f"  mop-up difficulty:  {labels.dc_class}")
print(f"  rate of spread:     {labels.spread_rate}")
print(f"  fire trigger:       {labels.fire_trigger}")
