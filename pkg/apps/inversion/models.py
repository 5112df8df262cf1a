"""
=============================================================================
Run Catalog Models
=============================================================================

`manage.py invert --catalog` keeps a record of every inversion in the
project database so finished runs can be queried later:

    InversionRun        one row per inversion (state point, scheme, outcome)
    IterationSummary    one row per iterate (k, data fit, epsilon, ...)

Relationships:
    - ForeignKey: one run has MANY iteration summaries

Unknown diagnostics (NaN in the history) are stored as NULL.

=============================================================================
"""

import math

from django.db import models


def _nullable(value):
    return None if value is None or math.isnan(value) else float(value)


class InversionRun(models.Model):
    """One inverse Henderson run and where its files live."""

    STATUS_CHOICES = (
        ('converged', 'Converged'),
        ('finished', 'Reached max iterations'),
        ('failed', 'Failed'),
    )

    # ----- Fields -----

    name = models.CharField(max_length=200, help_text="Config file stem")
    scheme = models.CharField(max_length=10)
    forward = models.CharField(max_length=10)
    density = models.FloatField()
    temperature = models.FloatField()
    directory = models.CharField(max_length=500, help_text="Run directory on disk")
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default='finished')
    best_iteration = models.IntegerField(null=True, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = 'Inversion run'
        verbose_name_plural = 'Inversion runs'
        ordering = ['-created_at']

    def __str__(self):
        return f'{self.name} ({self.scheme}/{self.forward})'

    # ----- Methods -----

    @classmethod
    def from_history(cls, name, cfg, state, directory, history):
        """Store a finished history with all its iteration summaries."""
        best = history.selected(cfg.keep_best)
        if history.failure is not None:
            status = 'failed'
        elif history.records and history.records[-1].data_fit <= cfg.stop_tolerance:
            status = 'converged'
        else:
            status = 'finished'
        run = cls.objects.create(
            name=name, scheme=cfg.name, forward=cfg.forward,
            density=state.density, temperature=state.temperature,
            directory=str(directory), status=status,
            best_iteration=best.k if best else None,
        )
        IterationSummary.objects.bulk_create([
            IterationSummary(
                run=run, k=record.k,
                data_fit=_nullable(record.data_fit),
                epsilon=_nullable(record.epsilon),
                pressure=_nullable(record.pressure),
                constraint_residual=_nullable(record.constraint_residual),
                status=record.status[:200],
            )
            for record in history
        ])
        return run


class IterationSummary(models.Model):
    """Diagnostics of one iterate of a catalogued run."""

    run = models.ForeignKey(InversionRun, on_delete=models.CASCADE, related_name='iterations')
    k = models.PositiveIntegerField()
    data_fit = models.FloatField(null=True, blank=True)
    epsilon = models.FloatField(null=True, blank=True)
    pressure = models.FloatField(null=True, blank=True)
    constraint_residual = models.FloatField(null=True, blank=True)
    status = models.CharField(max_length=200, default='ok')

    class Meta:
        ordering = ['run', 'k']
        unique_together = ['run', 'k']

    def __str__(self):
        return f'{self.run} k={self.k}'
