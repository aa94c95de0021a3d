"""
Stiffness benchmark: the resolved micro solver pays one step per eps/2
while the micro-macro scheme keeps a fixed macro step, so its cost is flat
in eps and the speedup grows as the gas gets stiffer.
"""
from mmbgk.experiments import speedup_bench

print("scheme     eps      wall[s]  steps  speedup")
for r in speedup_bench():
    print(f"{r.scheme:<9} {r.eps:<8g} {r.wall_time:7.3f}  {r.steps:5d}  {r.speedup:7.1f}")
