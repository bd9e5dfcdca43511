from django.apps import AppConfig


class AeroConfig(AppConfig):
    name = 'applications.aero'
    verbose_name = 'Aerodynamics and yaw'
