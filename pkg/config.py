"""
Sweep configuration: flat `key = value` files with `#` comments.

Example:
    # 100 separable 2x2 inputs, three budgets
    dims = 2, 2
    epsilons = 0.5, 0.1, 0.02
    samples = 100
    components = 4
    seed = 7
    output = results/sweep.csv
"""

from dataclasses import dataclass, replace
from pathlib import Path

from exceptions import ConfigError

MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple = (2, 2)
    epsilons: tuple = ()
    samples: int = 10
    components: int = 4
    seed: int = 0
    output_path: str = 'sweep.csv'
    input_kind: str = 'separable'  # or 'density'
    rank: int = None  # for input_kind = density; None means full rank
    enlarge: str = 'first'
    workers: int = 1

    def __post_init__(self):
        if len(self.dims) != 2 or any(d < 1 for d in self.dims):
            raise ConfigError(f"dims must be two positive integers, got {self.dims}")
        if not self.epsilons:
            raise ConfigError("epsilons must be a nonempty list")
        if any(not e > 0 for e in self.epsilons):
            raise ConfigError(f"epsilons must be strictly positive, got {self.epsilons}")
        if self.samples < 1:
            raise ConfigError(f"samples must be at least 1, got {self.samples}")
        if self.components < 1:
            raise ConfigError(f"components must be at least 1, got {self.components}")
        if not 0 <= self.seed < MAX_SEED:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.input_kind not in ('separable', 'density'):
            raise ConfigError(f"input must be 'separable' or 'density', got {self.input_kind!r}")
        if self.rank is not None and not 1 <= self.rank <= self.dims[0] * self.dims[1]:
            raise ConfigError(f"rank must be between 1 and {self.dims[0] * self.dims[1]}, "
                              f"got {self.rank}")
        if self.enlarge not in ('first', 'second'):
            raise ConfigError(f"enlarge must be 'first' or 'second', got {self.enlarge!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")

    def sample_seed(self, index):
        """Per-sample seed: the config seed plus the sample index, modulo 2^64"""
        return (self.seed + index) % MAX_SEED

    def with_output(self, output_path):
        return replace(self, output_path=str(output_path))


def _int_list(value):
    return tuple(int(x) for x in value.split(',') if x.strip())


def _float_list(value):
    return tuple(float(x) for x in value.split(',') if x.strip())


def _optional_int(value):
    return None if value.lower() in ('', 'none', 'full') else int(value)


# file key -> (dataclass field, converter)
KEYS = {
    'dims': ('dims', _int_list),
    'epsilons': ('epsilons', _float_list),
    'samples': ('samples', int),
    'components': ('components', int),
    'k': ('components', int),
    'seed': ('seed', int),
    'output': ('output_path', str),
    'output_path': ('output_path', str),
    'input': ('input_kind', str),
    'rank': ('rank', _optional_int),
    'enlarge': ('enlarge', str),
    'workers': ('workers', int),
}


def parse_config_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        name, convert = KEYS[key]
        try:
            values[name] = convert(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    if 'epsilons' not in values:
        raise ConfigError("missing required key 'epsilons'")
    return ExperimentConfig(**values)


def load_config(path):
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config_text(text)
