r"""
hdct settings file.

The available options are found in `hdct/conf/settings_default.py`.

Remember:

Don't copy more from the default file than you actually intend to
change; this will make sure that you don't overload upstream updates
unnecessarily.

If you want to keep machine-specific values out of version control, put
them in local_settings.py next to this file.

"""

# Use the defaults from hdct unless explicitly overridden
from hdct.conf.settings_default import *  # noqa: F401,F403

######################################################################
# Settings given in local_settings.py override those in this file.
######################################################################
try:
    from hdct.conf.local_settings import *  # noqa: F401,F403
except ImportError:
    pass
