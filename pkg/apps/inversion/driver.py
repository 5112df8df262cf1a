"""
=============================================================================
Inversion Driver
=============================================================================

    u_0 = potential of mean force of the target
    for k = 0, 1, ...:
        g_k, p_k = forward(u_k)
        record diagnostics of iterate k
        stop at max_iterations or when data_fit <= tolerance
        u_{k+1} = scheme.step(u_k, g_k, p_k)

Errors raised by the forward operator or by a step never escape: the
failing iterate is recorded with status 'failed: <message>' and the
exception is kept on history.failure so the caller can still write the
partial run and then exit with the matching code.

=============================================================================
"""

import logging
import math

from apps.core.exceptions import HendersonError

from .diagnostics import data_fit, error_metric, pmf_initial_guess, sup_deviation
from .history import IterationHistory, IterationRecord
from .schemes import make_scheme
from .signals import iteration_completed

logger = logging.getLogger(__name__)


def _failed(exc):
    return f'failed: {exc}'


def run_inversion(g_target, state, cfg, forward, u_ref=None, u_initial=None):
    """
    Iterate the configured scheme from the potential of mean force.

    Returns the IterationHistory; records are contiguous from k = 0.
    """
    history = IterationHistory()
    scheme = make_scheme(g_target, state, cfg)
    sender = type(scheme)

    def append(record):
        history.append(record)
        iteration_completed.send(sender=sender, record=record, history=history)

    try:
        u = u_initial
        if u is None:
            u = pmf_initial_guess(g_target, state.beta, cfg.core_threshold)
    except HendersonError as exc:
        history.failure = exc
        logger.error('Initial guess failed: %s', exc)
        return history

    initial_misfit = None
    tolerance = cfg.stop_tolerance
    for k in range(cfg.max_iterations + 1):
        try:
            result = forward(u)
        except HendersonError as exc:
            history.failure = exc
            append(IterationRecord(k, u, status=_failed(exc)))
            break

        deviation = sup_deviation(result.rdf, g_target)
        if initial_misfit is None:
            initial_misfit = deviation
        fit = data_fit(result.rdf, g_target, initial_misfit)
        epsilon = error_metric(u, u_ref, g_target) if u_ref is not None else math.nan

        record = dict(k=k, potential=u, rdf=result.rdf, data_fit=fit,
                      epsilon=epsilon, pressure=result.pressure)
        if k == cfg.max_iterations or fit <= tolerance:
            append(IterationRecord(**record))
            break
        try:
            step = scheme.step(u, result.rdf, result.pressure)
        except HendersonError as exc:
            history.failure = exc
            append(IterationRecord(**record, status=_failed(exc)))
            break
        append(IterationRecord(**record, constraint_residual=step.constraint_residual))
        u = step.potential

    best = history.best
    if best is not None:
        logger.info('%s finished after %d records; best iterate k=%d (data fit %.4e)',
                    cfg.name, len(history), best.k, best.data_fit)
    return history
