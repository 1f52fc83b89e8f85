"""Resolution of the operator sign convention used by the pipeline."""

import os

from .curv import Convention

ENV_VAR = "SOLNORM_CONVENTION"


def resolve_convention(value=None):
    """Map ``None`` / ``"audit"`` / a convention name to a :class:`Convention`.

    ``None`` falls back to ``$SOLNORM_CONVENTION`` and then to ``"audit"``,
    which selects whichever convention the (cached) audit finds commuting.
    """
    if isinstance(value, Convention):
        return value
    if value is None:
        value = os.environ.get(ENV_VAR, "audit")
    value = str(value).lower()
    if value == "audit":
        from .audit import audited_convention

        return audited_convention()
    try:
        return Convention(value)
    except ValueError:
        raise ValueError(f"unknown convention {value!r}; expected paper, commuting or audit") from None
