from django.db import models


class SynthesisRun(models.Model):
    KINDS = [
        ('synth', 'Synthesis'),
        ('verify', 'Verification'),
    ]

    kind = models.CharField(max_length=10, choices=KINDS)
    benchmark = models.CharField(max_length=100)
    engine = models.CharField(max_length=10, blank=True, default='')
    seed = models.BigIntegerField(blank=True, null=True)
    outcome = models.CharField(max_length=40)
    report = models.JSONField(default=dict)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', '-id']

    def __str__(self):
        return f"{self.kind} {self.benchmark} - {self.outcome}"

    @property
    def succeeded(self):
        return self.outcome in ('Success', 'Stable')

    @classmethod
    def record(cls, kind, report, benchmark, engine='', seed=None):
        outcome = report['outcome'] if kind == 'synth' else report['verdict']
        return cls.objects.create(kind=kind, benchmark=benchmark, engine=engine, seed=seed,
                                  outcome=outcome, report=report)
