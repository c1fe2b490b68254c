"""Static version information; bump on release."""

version_json = {
    "version": "0.1.0",
    "full-revisionid": None,
    "dirty": False,
    "error": None,
}


def get_versions():
    return dict(version_json)
