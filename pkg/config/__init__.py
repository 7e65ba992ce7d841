from .settings import Tolerances, ToleranceManager, tolerance_manager, resolve_tolerances
from .run_config import RunConfig, ConfigError, load_run_config, build_manifest, MANIFEST_NAME
