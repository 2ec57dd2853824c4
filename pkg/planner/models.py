from django.db import models


class ProofRun(models.Model):
    """One recorded prover run: a single `prove`, or one trial of a `bench` batch."""

    KIND_CHOICES = [
        ('Infeasible', 'Infeasible'),
        ('FeasibleAtResolution', 'Feasible at resolution'),
        ('StartOrGoalInObstacle', 'Start or goal in obstacle'),
        ('Timeout', 'Timeout'),
    ]

    scenario = models.CharField(max_length=200, db_index=True)
    scenario_path = models.CharField(max_length=500, blank=True)
    batch = models.CharField(max_length=100, blank=True, db_index=True, help_text='Bench batch label; empty for single runs')
    trial = models.PositiveIntegerField(null=True, blank=True)
    seed = models.BigIntegerField(null=True, blank=True)
    kind = models.CharField(max_length=32, choices=KIND_CHOICES, db_index=True)
    iterations = models.PositiveIntegerField(default=0)
    segmentation_time = models.FloatField(default=0.0, help_text='Seconds spent segmenting')
    total_time = models.FloatField(default=0.0, help_text='Wall clock seconds for the whole run')
    dims = models.JSONField(default=list, help_text='Grid resolution per axis')
    params = models.JSONField(default=dict, help_text='ns, d, connectivity, segment_every, threads')
    bitmap_sha256 = models.CharField(max_length=64, blank=True)
    verdict = models.JSONField(null=True, blank=True, help_text='Full verdict document')
    created_at = models.DateTimeField(auto_now_add=True, db_index=True)

    class Meta:
        ordering = ['-created_at', '-id']

    def __str__(self):
        label = f"{self.batch} #{self.trial}" if self.batch else f"run {self.pk}"
        return f"{self.scenario} – {label} – {self.kind}"

    @classmethod
    def from_verdict(cls, verdict_doc, scenario_path='', batch='', trial=None):
        """Build (unsaved) from a verdict dict as produced by Verdict.to_dict()."""
        return cls(
            scenario=verdict_doc.get('scenario') or '',
            scenario_path=str(scenario_path),
            batch=batch,
            trial=trial,
            seed=verdict_doc.get('seed'),
            kind=verdict_doc['kind'],
            iterations=verdict_doc.get('iterations') or 0,
            segmentation_time=verdict_doc.get('segmentation_time') or 0.0,
            total_time=verdict_doc.get('total_time') or 0.0,
            dims=verdict_doc.get('grid', {}).get('dims', []),
            params=verdict_doc.get('params') or {},
            bitmap_sha256=verdict_doc.get('bitmap_sha256') or '',
            verdict=verdict_doc,
        )

    def summary(self):
        return {
            'id': self.pk,
            'scenario': self.scenario,
            'batch': self.batch,
            'trial': self.trial,
            'seed': self.seed,
            'kind': self.kind,
            'iterations': self.iterations,
            'segmentation_time': self.segmentation_time,
            'total_time': self.total_time,
            'dims': self.dims,
            'bitmap_sha256': self.bitmap_sha256,
            'created_at': self.created_at.isoformat() if self.created_at else None,
        }
