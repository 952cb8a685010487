import math
from enum import Enum

# --- Enums ---

class Outcome(str, Enum):
    WIN = "W"
    LOSE = "L"
    TIE = "T"

class ObservableKind(str, Enum):
    MU = "mu"
    DELTA = "delta"
    ZERO = "zero"
    SPECTRAL = "spectral"

class StepKind(str, Enum):
    GENERAL = "general"
    CONVENTIONAL = "conventional"
    SPLIT = "split"

# --- Numerical Tolerances ---

NORM_TOL = 1e-12        # CoinState normalization
RENORM_TOL = 1e-6       # inputs within this are renormalized, worse are rejected
PROB_TOL = 1e-10        # total probability of composite states
TI_TOL = 1e-9           # translational invariance overlap
TIE_TOL = 1e-9          # win/lose band around Omega
DEGENERACY_TOL = 1e-10  # o_max - o_min gap below which a walk is degenerate
SUPPORT_TOL = 1e-24     # site probability treated as empty
CHAIN_TOL = 1e-9        # |<c_i|s_i+1>| = 1 for daisy chains
ORTHO_TOL = 1e-10       # spectral eigenvector orthogonality

# --- Defaults ---

DEFAULT_GRID = (181, 361)
DEFAULT_SEED = 0
DEFAULT_TRIALS = 1000
DEFAULT_N_RANGE = (1, 19)
DEFAULT_OUT_DIR = "out"
CSV_DIGITS = 12
DISPLAY_DIGITS = 3

# Environment overrides (read by app.py after load_dotenv)
ENV_OUT_DIR = "PARRONDO_OUT_DIR"
ENV_SEED = "PARRONDO_SEED"
ENV_TIE_TOL = "PARRONDO_TIE_TOL"
ENV_GRID = "PARRONDO_GRID"

# --- Named Coin States ---

# (s0, s1) amplitudes; see README for the naming
_R2 = 1 / math.sqrt(2)
NAMED_STATES = {
    "0": (1 + 0j, 0j),
    "1": (0j, 1 + 0j),
    "h": (_R2 + 0j, _R2 + 0j),
    "v": (-_R2 + 0j, _R2 + 0j),
    "d": (_R2 + 0j, 1j * _R2),
    "a": (1j * _R2, _R2 + 0j),
    "f": (math.cos(math.pi / 8) + 0j, math.sin(math.pi / 8) + 0j),
}

# --- Visual Settings (SVG / Plotly) ---

COLOR_NEGATIVE = '#c0392b'  # Red, bars at m < 0
COLOR_POSITIVE = '#27ae60'  # Green, bars at m > 0
COLOR_ORIGIN = '#000000'    # Black, bar at m = 0
COLOR_MARKER = '#1f3a93'    # Navy star markers
COLOR_AXIS = '#444444'

# Curve colours per walk index, cycled
WALK_COLORS = ['#1f3a93', '#e67e22', '#f1c40f', '#8e44ad', '#16a085', '#d35400', '#2c3e50']

# Palette for label vectors, indexed by the integer code of the vector (Win bits)
REGION_PALETTE = [
    '#fde0dd', '#fa9fb5', '#c51b8a', '#7a0177',
    '#e0f3db', '#a8ddb5', '#43a2ca', '#0868ac',
    '#fff7bc', '#fec44f', '#d95f0e', '#993404',
    '#f7f7f7', '#cccccc', '#969696', '#525252',
]
COLOR_TIE = '#ffffff'
COLOR_PARRONDO_OUTLINE = '#000000'

SVG_WIDTH = 720
SVG_HEIGHT = 420
