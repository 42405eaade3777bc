import os


DEFAULT_SEED = 20240601
DEFAULT_LEVEL_CAP = 10
DEFAULT_DEPTH_CAP = 32
DEFAULT_OUTPUT_FORMAT = "tsv"
OUTPUT_FORMATS = ("tsv", "json", "csv")
CACHE_ENV_VAR = "THURSTON_CACHE"


BUNDLED_RULES = {
    "lattes2x2": "lattes2x2.rule",
    "checkerboard3x3": "checkerboard3x3.rule",
    "barycentric": "barycentric.rule",
}


def cache_dir_from_env():
    return os.environ.get(CACHE_ENV_VAR) or None


def list_bundled_rules() -> list[str]:
    return sorted(BUNDLED_RULES)
