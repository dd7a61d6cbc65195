# SPDX-License-Identifier: GPL-3.0-or-later
"""
Functions for checking the installed version of the triple-mrf CLI.
"""

import pkg_resources

UNKNOWN_VERSION = "Unknown (Not installed via pip)"


def get_local_version():
    try:
        return pkg_resources.get_distribution("triple-mrf").version

    except pkg_resources.DistributionNotFound:
        return UNKNOWN_VERSION


def get_version_message():
    local_version = get_local_version()

    if local_version == UNKNOWN_VERSION:
        return f"triple-mrf {local_version}"

    return f"triple-mrf v{local_version.strip()}"
