# Generated by Django 5.2.8 on 2026-10-18 10:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SynthesisRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('synth', 'Synthesis'), ('verify', 'Verification')], max_length=10)),
                ('benchmark', models.CharField(max_length=100)),
                ('engine', models.CharField(blank=True, default='', max_length=10)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('outcome', models.CharField(max_length=40)),
                ('report', models.JSONField(default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
    ]
