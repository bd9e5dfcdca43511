from django.apps import AppConfig


class ScenariosConfig(AppConfig):
    name = 'applications.scenarios'
    verbose_name = 'Scenario files, batch runs and reports'
