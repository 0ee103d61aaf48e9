from .csvio import read_csv, write_csv
from .manifest import RunManifest
from .rng import SeedBank, rng_stream

__all__ = ["RunManifest", "SeedBank", "read_csv", "rng_stream", "write_csv"]
