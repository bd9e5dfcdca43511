from django.apps import AppConfig


class PlantConfig(AppConfig):
    name = 'applications.plant'
    verbose_name = 'Twin turbine plant'
