"""
WSGI entry point for the synthesis API (verify, synthesize, run history).

    gunicorn core.wsgi

is enough for a shared deployment; ``manage.py runserver`` uses the same
callable locally.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')

application = get_wsgi_application()
