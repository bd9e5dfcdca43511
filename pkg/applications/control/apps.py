from django.apps import AppConfig


class ControlConfig(AppConfig):
    name = 'applications.control'
    verbose_name = 'Fault-tolerant control laws'
