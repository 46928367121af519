"""Parse decision rules, saturate a fact base, and explain a conclusion.

Run: python demos/demo_rules.py
"""

from firedss import data_text, rules

ruleset = rules.parse_rules(data_text("tables_3_4_5.rules"))
print(f"loaded {len(ruleset)} decision rules, e.g.:")
for rule in list(ruleset)[:3]:
    print(f"  {rule.name}: {len(rule.body)} conditions -> "
          f"{rules.format_atom(rule.head[0])}")

# Describe a concrete situation as ground facts.
situation = rules.parse_facts("""
# a planned prevention action for a low-risk scenario
PreventiveAction(clear_brush)
hasScenario(clear_brush, north_slope)
hasIgnitionRisk(north_slope, 0.35)
hasBurnedArea(north_slope, 420)

# suppression resources on site
WaterTanker(tanker_1)
hasWaterCapacity(tanker_1, 3500)
SpecializedPersonnel(kim)
hasTraining(kim, "Firefighting")
Zone(north_slope_zone)
hasRiskLevel(north_slope_zone, "High")
""")
print(f"\nasserted {len(situation)} facts about the situation")

conclusions = rules.evaluate(ruleset, situation)
print(f"forward chaining derived {len(conclusions.derived())} recommendations:")
for fact in sorted(conclusions.derived(), key=rules.format_atom):
    print(f"  {rules.format_atom(fact)}")

# Every recommendation traces back to the rule and facts that produced it.
target = rules.Atom("reduceIgnitionRisk", (rules.Individual("clear_brush"),))
tree = rules.explain(conclusions, target)
print(f"\nwhy {rules.format_atom(target)}?")
print(f"  rule: {tree.rule}")
print(f"  bindings: {rules.format_bindings(dict(tree.bindings))}")
print("  premises:")
for leaf in tree.leaves():
    print(f"    {rules.format_atom(leaf)}")

# Thresholds behave exactly as written: 0.5 is inclusive, 5000 is strict.
risky = rules.parse_facts("PreventiveAction(a)\nhasScenario(a, s)\n"
                          "hasIgnitionRisk(s, 0.5)")
print("\nrisk exactly 0.5 still fires:",
      rules.Atom("reduceIgnitionRisk", (rules.Individual("a"),))
      in rules.evaluate(ruleset, risky))
big_tanker = rules.parse_facts("WaterTanker(t)\nhasWaterCapacity(t, 5000)")
print("capacity exactly 5000 does not:",
      rules.Atom("deployMultipleVehicles", (rules.Individual("t"),))
      not in rules.evaluate(ruleset, big_tanker))
