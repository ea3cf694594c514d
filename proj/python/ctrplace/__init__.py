"""Controller placement, reaction-time models and a control-plane simulator."""

from ._ctrplace import *  # noqa: F401,F403
from ._ctrplace import EnumerationCapExceeded, DelayPoint, Placement  # noqa: F401
