"""Phononic Casimir energies between elastic plates across an elastic gap."""
from .lifshitz import EnergyBreakdown, LayerStack, energy_total
from .materials import ElasticMaterial, SoundSpeeds, builtin_table, default_db, sound_speeds

__all__ = [
    "ElasticMaterial", "SoundSpeeds", "builtin_table", "default_db", "sound_speeds",
    "LayerStack", "EnergyBreakdown", "energy_total",
]
