from django.apps import AppConfig


class MachineConfig(AppConfig):
    name = 'applications.machine'
    verbose_name = 'Permanent magnet synchronous machine'
