"""Read-only JSON views over recorded prover runs."""
import logging

import numpy as np
from django.http import JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.http import require_http_methods

from .models import ProofRun

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ('iterations', 'segmentation_time', 'total_time')


def mean_std(values):
    """Population mean and standard deviation, the way bench tables report them."""
    if not values:
        return {'mean': None, 'std': None}
    arr = np.asarray(values, dtype=float)
    return {'mean': float(arr.mean()), 'std': float(arr.std())}


@require_http_methods(["GET"])
def run_list(request):
    runs = ProofRun.objects.all()
    scenario = request.GET.get('scenario')
    batch = request.GET.get('batch')
    if scenario:
        runs = runs.filter(scenario=scenario)
    if batch:
        runs = runs.filter(batch=batch)
    return JsonResponse({'runs': [run.summary() for run in runs[:500]]})


@require_http_methods(["GET"])
def run_detail(request, pk):
    run = get_object_or_404(ProofRun, pk=pk)
    payload = run.summary()
    payload['params'] = run.params
    payload['verdict'] = run.verdict
    return JsonResponse(payload)


@require_http_methods(["GET"])
def batch_summary(request, label):
    runs = list(ProofRun.objects.filter(batch=label).order_by('trial', 'id'))
    if not runs:
        return JsonResponse({"error": f"No runs recorded for batch '{label}'."}, status=404)
    kinds = {}
    for run in runs:
        kinds[run.kind] = kinds.get(run.kind, 0) + 1
    payload = {
        'batch': label,
        'scenario': runs[0].scenario,
        'trials': len(runs),
        'kinds': kinds,
    }
    for column in SUMMARY_COLUMNS:
        payload[column] = mean_std([getattr(run, column) for run in runs])
    return JsonResponse(payload)
