# Generated by Django 5.2.10 on 2026-10-17 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='InversionRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(help_text='Config file stem', max_length=200)),
                ('scheme', models.CharField(max_length=10)),
                ('forward', models.CharField(max_length=10)),
                ('density', models.FloatField()),
                ('temperature', models.FloatField()),
                ('directory', models.CharField(help_text='Run directory on disk', max_length=500)),
                ('status', models.CharField(choices=[('converged', 'Converged'), ('finished', 'Reached max iterations'), ('failed', 'Failed')], default='finished', max_length=10)),
                ('best_iteration', models.IntegerField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Inversion run',
                'verbose_name_plural': 'Inversion runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='IterationSummary',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('k', models.PositiveIntegerField()),
                ('data_fit', models.FloatField(blank=True, null=True)),
                ('epsilon', models.FloatField(blank=True, null=True)),
                ('pressure', models.FloatField(blank=True, null=True)),
                ('constraint_residual', models.FloatField(blank=True, null=True)),
                ('status', models.CharField(default='ok', max_length=200)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='iterations', to='inversion.inversionrun')),
            ],
            options={
                'ordering': ['run', 'k'],
                'unique_together': {('run', 'k')},
            },
        ),
    ]
