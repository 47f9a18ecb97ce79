"""
Constants of the hypotheses and an Artin-Schreier witness
=========================================================
"""

from ffcircle.gate import find_witness, gamma_margin, gate_thm31, minimal_admissible_prime, thresholds

print("d = 5 thresholds:", thresholds(5))
print(gate_thm31(5, 14, 351, 0, 1, 1759).overall, gate_thm31(5, 13, 351, 0, 1, 1759).failing())

# at p = 1755 the gamma margin is exactly 1/9; any larger p leaves room
print("gamma margin at 1755:", gamma_margin(5, 1755), " at 1759:", float(gamma_margin(5, 1759)))

p = minimal_admissible_prime(5)
w = find_witness(5, 3, 1, p)
print(f"p={w.p} m={w.m} b={w.b} m_x={w.m_x} g'={w.g_prime} margin={w.margin}")
