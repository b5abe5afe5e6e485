# Every operation reads these at call time, so assigning to them (or passing the
# matching command line flag) changes the defaults for the rest of the process.

# Closed orbits
ORBIT_TOL = 1e-9
INTEGRATOR_TOL = 1e-10
SHOOTING_TOL = 1e-11
MAX_NEWTON_ITER = 25
DIVISOR_TOL = 1e-6
MAX_DIVISOR = 6
PERIOD_MATCH_TOL = 1e-7
REINTEGRATION_TOL = 1e-8

# Finite differences and rank decisions
FD_STEP = 1e-5
SINGULAR_CUTOFF = 1e-6
MONODROMY_COND_LIMIT = 1e12
REEB_RESIDUAL_TOL = 1e-8

# Conformal factor extrema
FACTOR_GRID = 64
FACTOR_GRID_BUDGET = 200_000

# Orbit scans
SEED_GRID = None
SEED_BUDGET = 256
RECURRENCE_TOL = 0.25
RECURRENCE_SAMPLES = 600
MAX_SHOTS = 48
HAUSDORFF_TOL = 1e-4
RESAMPLE_POINTS = 256
COVERAGE_THRESHOLD = 0.2
SCAN_WORKERS = 4

# Spectra
SPECTRUM_CAP = 20.0

# Profiles
PROFILE_SAMPLES = 10_000
PROFILE_QUADRATURE_PANELS = 1024
PROFILE_QUADRATURE_NODES = 32

# Plug
PLUG_GRID = 512
PLUG_RHO_GRID = 64
PLUG_S_GRID = 32
PLUG_FD_STEP = 2e-6
PROPERTY_SAMPLES = 10_000
KERNEL_SAMPLES = 1_000
KERNEL_TOL = 1e-8
