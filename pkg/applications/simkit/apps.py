from django.apps import AppConfig


class SimkitConfig(AppConfig):
    name = 'applications.simkit'
    verbose_name = 'Closed-loop simulation'
