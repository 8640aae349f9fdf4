"""In-game command table: ``pl-start``, ``pl-stop``, their ``-op`` forms and ``pl-version``.

Every command returns the feedback line shown to the issuer, or raises
:class:`CommandError` whose message is the rejection feedback.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from voxlog.capture.session import SessionError, SessionManager
from voxlog.world.scenario import CONSOLE, Directive

log = logging.getLogger(__name__)

OP_REQUIRED = "requires operator (OP) privileges"


class CommandError(Exception):
    pass


class CommandPermissionError(CommandError):
    pass


@dataclass(frozen=True)
class CommandResult:
    tick: int
    issuer: str
    command: str
    ok: bool
    message: str


class CommandSurface:
    def __init__(self, manager: SessionManager):
        self.manager = manager

    def is_operator(self, issuer: str) -> bool:
        if issuer == CONSOLE:
            return True
        avatar = self.manager.world.avatars.get(issuer)
        return avatar is not None and avatar.operator

    def _subject(self, issuer: str, op_mode: bool, target: str | None, verb: str) -> str:
        if op_mode:
            if not self.is_operator(issuer):
                raise CommandPermissionError(f"{verb}-op {OP_REQUIRED}")
            if not target:
                raise CommandError(f"usage: {verb}-op <username>")
            return target
        if target is not None and target != issuer:
            raise CommandError(f"{verb} acts on yourself; use {verb}-op <username>")
        if issuer == CONSOLE:
            raise CommandError(f"the console cannot log itself; use {verb}-op <username>")
        return issuer

    def cmd_start(self, issuer: str, op_mode: bool = False, target: str | None = None) -> str:
        subject = self._subject(issuer, op_mode, target, "pl-start")
        try:
            handle = self.manager.start_session(subject)
        except SessionError as exc:
            raise CommandError(str(exc)) from None
        return f"logging started for {subject} (logfile {handle.logfile_id})"

    def cmd_stop(self, issuer: str, op_mode: bool = False, target: str | None = None) -> str:
        subject = self._subject(issuer, op_mode, target, "pl-stop")
        try:
            finished = self.manager.stop_session(subject)
        except SessionError as exc:
            raise CommandError(str(exc)) from None
        where = finished.path if finished.path is not None else finished.metadata.filename
        note = f", {finished.dropped} dropped" if finished.dropped else ""
        return f"logging stopped for {subject}: {finished.entries} entries{note}, saved to {where}"

    def cmd_version(self, issuer: str) -> str:
        return f"voxlog plugin version {self.manager.plugin_version}"

    def execute(self, directive: Directive) -> CommandResult:
        """Run one scripted directive; rejections become a failed result, not an exception."""
        tick = self.manager.world.tick
        verb = directive.command
        try:
            if verb in ("pl-start", "pl-start-op"):
                message = self.cmd_start(directive.issuer, verb.endswith("-op"), directive.target)
            elif verb in ("pl-stop", "pl-stop-op"):
                message = self.cmd_stop(directive.issuer, verb.endswith("-op"), directive.target)
            elif verb == "pl-version":
                message = self.cmd_version(directive.issuer)
            elif verb == "disconnect":
                finished = self.manager.handle_disconnect(directive.issuer)
                message = f"{directive.issuer} disconnected"
                if finished is not None:
                    message += f"; session saved to {finished.path or finished.metadata.filename}"
            else:
                raise CommandError(f"unknown command {verb!r}")
        except CommandError as exc:
            log.info("tick %d: %s %s rejected: %s", tick, directive.issuer, verb, exc)
            return CommandResult(tick, directive.issuer, verb, False, str(exc))
        return CommandResult(tick, directive.issuer, verb, True, message)
