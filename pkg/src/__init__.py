# Capillary droplet waves toolkit core module
__version__ = "0.3.0"
