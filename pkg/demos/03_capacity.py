"""
How much fits in one call
=========================

Compares the published per-method budget for a five-message call with what
the implemented channels measure on concrete messages.
"""

from sipsteg.callflow import default_scenario, smime_scenario
from sipsteg.capacity import compute_total, measured_scenario, paper_scenario

print(compute_total(paper_scenario()).to_text())

# measured numbers use power-of-two alphabets, so they come out smaller per character
for scenario in (default_scenario(), smime_scenario()):
    print(scenario.name)
    print(measured_scenario(scenario.messages()).to_text())
