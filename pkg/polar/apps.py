from django.apps import AppConfig


class PolarConfig(AppConfig):
    name = "polar"
    verbose_name = "Polar code simulation"
