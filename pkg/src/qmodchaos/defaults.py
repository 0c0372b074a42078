"""Experiment constants, kept in one place for the library, CLI, tests and docs."""

N_BITS = 4
MODULUS = 2**N_BITS

# Experiment A: one section, delay swept over every residue
EXP_A_W = 3
EXP_A_X_IN = 13

# Experiment B: first-order oscillator, zero input
EXP_B_W = (3,)
EXP_B_IC = (13,)
EXP_B_INPUT = 0
EXP_B_SAMPLES = 50
EXP_B_P_GRID = (0.0, 0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16)
EXP_B_RUNS = 10
BASE_SEED = 1234

# Experiment C: fourth-order oscillator
EXP_C_W = (13, 0, 0, 1)
EXP_C_PERIOD = 120
# first nonzero initial condition in lexicographic scan order reaching period 120
EXP_C_IC = (0, 0, 0, 1)
EXP_C_SPOT_CHECKS = 8
EXP_C_ACF_BOUND = 0.35

SEED_ENV = "QMODCHAOS_SEED"
