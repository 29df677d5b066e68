from .configuration import LabConfig, load_lab_config
from .models import ComplexDefinition, GroupDefinition
from .reports import SCHEMA_VERSION

__all__ = [
    'LabConfig',
    'load_lab_config',
    'ComplexDefinition',
    'GroupDefinition',
    'SCHEMA_VERSION',
]
