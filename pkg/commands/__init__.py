from .common import CommandResult, EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_DIVERGENT, EXIT_ABORTED
from .cone import run_cone
from .certify import run_certify
from .simulate import run_simulate
from .oracle_compare import run_oracle_compare

COMMANDS = {
    'cone': run_cone,
    'certify': run_certify,
    'simulate': run_simulate,
    'oracle-compare': run_oracle_compare,
}
