import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Base directory
BASE_DIR = Path(__file__).resolve().parent.parent

# Parallelism cap for batch evaluation (0 = use every core)
FASTONN_THREADS = int(os.getenv('FASTONN_THREADS', '0'))

# Seeding and output
DEFAULT_SEED = int(os.getenv('FASTONN_SEED', '0'))
DEFAULT_OUTPUT_DIR = os.getenv('FASTONN_OUTPUT_DIR', '.')

# Directory holding <dataset>/train-images-idx3-ubyte[.gz] etc.
FASTONN_DATA_DIR = os.getenv('FASTONN_DATA_DIR')

LOG_LEVEL = os.getenv('FASTONN_LOG_LEVEL', 'INFO')

# Dataset names and the IDX file names they ship with
DATASET_FILES = {
    'train_images': 'train-images-idx3-ubyte',
    'train_labels': 'train-labels-idx1-ubyte',
    'test_images': 't10k-images-idx3-ubyte',
    'test_labels': 't10k-labels-idx1-ubyte',
}
SUPPORTED_DATASETS = ['mnist', 'fashion-mnist']

TOOL_VERSION = "0.1.0"


def n_jobs() -> int:
    """Translate FASTONN_THREADS into a joblib n_jobs value."""
    threads = int(os.getenv('FASTONN_THREADS', str(FASTONN_THREADS)))
    return -1 if threads <= 0 else threads

# CSV numeric formatting (17 significant digits round-trips a float64)
CSV_FLOAT_FORMAT = "%.17g"
