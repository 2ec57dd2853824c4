# Generated by Django 5.2.11 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ProofRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("scenario", models.CharField(db_index=True, max_length=200)),
                ("scenario_path", models.CharField(blank=True, max_length=500)),
                (
                    "batch",
                    models.CharField(
                        blank=True,
                        db_index=True,
                        help_text="Bench batch label; empty for single runs",
                        max_length=100,
                    ),
                ),
                ("trial", models.PositiveIntegerField(blank=True, null=True)),
                ("seed", models.BigIntegerField(blank=True, null=True)),
                (
                    "kind",
                    models.CharField(
                        choices=[
                            ("Infeasible", "Infeasible"),
                            ("FeasibleAtResolution", "Feasible at resolution"),
                            ("StartOrGoalInObstacle", "Start or goal in obstacle"),
                            ("Timeout", "Timeout"),
                        ],
                        db_index=True,
                        max_length=32,
                    ),
                ),
                ("iterations", models.PositiveIntegerField(default=0)),
                (
                    "segmentation_time",
                    models.FloatField(default=0.0, help_text="Seconds spent segmenting"),
                ),
                (
                    "total_time",
                    models.FloatField(
                        default=0.0, help_text="Wall clock seconds for the whole run"
                    ),
                ),
                (
                    "dims",
                    models.JSONField(default=list, help_text="Grid resolution per axis"),
                ),
                (
                    "params",
                    models.JSONField(
                        default=dict,
                        help_text="ns, d, connectivity, segment_every, threads",
                    ),
                ),
                ("bitmap_sha256", models.CharField(blank=True, max_length=64)),
                (
                    "verdict",
                    models.JSONField(
                        blank=True, help_text="Full verdict document", null=True
                    ),
                ),
                (
                    "created_at",
                    models.DateTimeField(auto_now_add=True, db_index=True),
                ),
            ],
            options={
                "ordering": ["-created_at", "-id"],
            },
        ),
    ]
