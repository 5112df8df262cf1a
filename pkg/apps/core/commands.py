"""
=============================================================================
Command Base Class - Exit Codes for Management Commands
=============================================================================

Every project command subclasses HendersonCommand and implements run()
instead of handle(). Toolkit errors are translated into CommandError with
the error's exit code, so

    python manage.py hnc_solve broken.ini; echo $?

prints 2 for a config problem, 3 for a solver that did not converge, and
so on (see apps/core/exceptions.py).

=============================================================================
"""

from django.core.management.base import BaseCommand, CommandError

from .exceptions import HendersonError


class HendersonCommand(BaseCommand):
    """BaseCommand that maps HendersonError onto process exit codes."""

    def run(self, *args, **options):
        raise NotImplementedError('subclasses of HendersonCommand must provide run()')

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except HendersonError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    def fail(self, exc):
        """Raise CommandError for an error that was caught and recorded earlier."""
        raise CommandError(str(exc), returncode=getattr(exc, 'exit_code', 1)) from exc

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))

    def report(self, label, value):
        self.stdout.write(f'  {label:<28} {value}')
