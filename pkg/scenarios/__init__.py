from .library import (
    wedge_domain, parabola_domain, unit_disk_domain, half_plane_domain, half_line_domain, moving_wall_domain,
)
from .two_bus import TwoBusParams, PowerFlowState, two_bus_domain, default_feedback_field
from .catalog import Scenario, SCENARIOS, get_scenario, custom_scenario, list_scenarios
