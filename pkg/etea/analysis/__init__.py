from etea.analysis.avalanche import AvalancheReport  # noqa: F401
from etea.analysis.keyspace import EquivalenceReport, equivalent_keys  # noqa: F401
