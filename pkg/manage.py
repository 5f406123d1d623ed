#!/usr/bin/env python
"""
Command-line entry point.

    python manage.py synth synthesis/fixtures/cruise_control.bench --engine two --seed 0
    python manage.py verify synthesis/fixtures/cruise_control.bench --controller synthesis/fixtures/cruise_final.ctrl
    python manage.py test synthesis
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the pinned stack with "
            "`pip install -r requirements.txt` inside a virtual environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
