"""Application configuration split out for clarity."""

DJANGO_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
]

THIRD_PARTY_APPS = [
    'rest_framework',
]

LOCAL_APPS = [
    'applications.core',
    'applications.aero',
    'applications.machine',
    'applications.plant',
    'applications.control',
    'applications.simkit',
    'applications.scenarios',
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS
