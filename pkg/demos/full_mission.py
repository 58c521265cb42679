"""
A full spot-spraying mission
============================

Loads the golden scenario (three rows, five weeds over a 5 m field),
drives it end to end, and prints the interrupt/resume story: navigation
suspends when the detector reports weeds in the footprint, a spray plan
is built over the detections, the turret works through it, and driving
resumes on the spray-complete signal.  The full report lands in
demos/output/mission/ as the same CSV directory `sparrow run` writes.
"""

import os

from sparrow import load_scenario, run_mission, write_report

here = os.path.dirname(os.path.abspath(__file__))
scenario_path = os.path.join(here, "..", "scenarios", "golden.scn")
out_dir = os.path.join(here, "output", "mission")

with open(scenario_path, "r", encoding="utf-8") as fh:
    scenario = load_scenario(fh.read())

print(f"field: {scenario.field_length} cm, rows at "
      f"{[r.offset for r in scenario.rows]}, {len(scenario.weeds)} weeds")

report = run_mission(scenario, planner_mode="hybrid")

print(f"\nstatus: {report.status}")
print("timeline:")
for entry in report.timeline:
    print(f"  {entry.t:8.2f} s  {entry.phase:<11} {entry.event}")

t = report.totals
print(f"\ndetected {t.weeds_detected}, sprayed {t.weeds_sprayed}, "
      f"covered {t.weeds_covered}")
print(f"drove {t.distance_cm:.0f} cm in {t.mission_time_s:.1f} s "
      f"({len(report.spray_logs)} spray sessions)")

write_report(report, out_dir)
print(f"\nreport written to {out_dir}")
print("rerunning the mission reproduces the directory byte for byte")
