from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'applications.core'
    verbose_name = 'Twin wind turbine lab core'
