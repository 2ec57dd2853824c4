from django import forms
from django.conf import settings

from .engine import ProverParams
from .segmentation import CONNECTIVITIES

CONNECTIVITY_CHOICES = [(c, c) for c in CONNECTIVITIES]

# option name -> settings name supplying its default
SETTING_DEFAULTS = {
    'ns': 'PLANNER_NS',
    'd': 'PLANNER_D',
    'connectivity': 'PLANNER_CONNECTIVITY',
    'segment_every': 'PLANNER_SEGMENT_EVERY',
    'threads': 'PLANNER_THREADS',
}


class ProverOptionsForm(forms.Form):
    """Validates the prover flags shared by the management commands."""
    ns = forms.IntegerField(min_value=1)
    d = forms.IntegerField(min_value=0)
    connectivity = forms.ChoiceField(choices=CONNECTIVITY_CHOICES)
    segment_every = forms.IntegerField(min_value=1)
    threads = forms.IntegerField(min_value=1, max_value=256)
    seed = forms.IntegerField(required=False, min_value=0)
    resolution = forms.CharField(required=False, help_text='One integer, or one per axis separated by commas')
    truncate_links = forms.IntegerField(required=False, min_value=1)
    timeout = forms.FloatField(required=False, min_value=0.001)
    obstacle_scale = forms.FloatField(required=False, help_text='Scale every obstacle about its centre')
    ns_values = forms.CharField(required=False, help_text='Comma-separated ns values to sweep')
    d_values = forms.CharField(required=False, help_text='Comma-separated d values to sweep')

    @classmethod
    def from_options(cls, options):
        """Bind command options, falling back to settings for anything not given."""
        data = {}
        for name in cls.base_fields:
            value = options.get(name)
            if value is None and name in SETTING_DEFAULTS:
                value = getattr(settings, SETTING_DEFAULTS[name])
            if value is not None:
                data[name] = value
        return cls(data)

    def clean_resolution(self):
        raw = (self.cleaned_data.get('resolution') or '').strip()
        if not raw:
            return None
        try:
            values = [int(part) for part in raw.split(',')]
        except ValueError:
            raise forms.ValidationError('Resolution must be integers separated by commas.')
        if any(n < 2 for n in values):
            raise forms.ValidationError('Every resolution must be at least 2.')
        return values[0] if len(values) == 1 else tuple(values)

    def clean_obstacle_scale(self):
        scale = self.cleaned_data.get('obstacle_scale')
        if scale is not None and scale <= 0:
            raise forms.ValidationError('Obstacle scale must be positive.')
        return scale

    def _int_list(self, name, minimum):
        raw = (self.cleaned_data.get(name) or '').strip()
        if not raw:
            return None
        try:
            values = [int(part) for part in raw.split(',')]
        except ValueError:
            raise forms.ValidationError('Expected integers separated by commas.')
        if any(v < minimum for v in values):
            raise forms.ValidationError(f'Every value must be at least {minimum}.')
        # keep the order given, drop repeats
        return list(dict.fromkeys(values))

    def clean_ns_values(self):
        return self._int_list('ns_values', 1)

    def clean_d_values(self):
        return self._int_list('d_values', 0)

    def prover_params(self, timeout=None):
        data = self.cleaned_data
        return ProverParams(
            ns=data['ns'],
            d=data['d'],
            connectivity=data['connectivity'],
            segment_every=data['segment_every'],
            threads=data['threads'],
            batch_per_worker=settings.PLANNER_BATCH_PER_WORKER,
            timeout=timeout,
        )

    def error_text(self):
        return '; '.join(f"{name}: {' '.join(errors)}" for name, errors in self.errors.items())
